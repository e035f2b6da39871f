#ifndef WISHLAB_CSV_HPP
#define WISHLAB_CSV_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "wishlab/events.hpp"
#include "wishlab/integrators.hpp"

namespace wishlab {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// One output file: a `# ` comment line, the header row, then data rows.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, std::string_view comment, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::string_view v);
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream os_;
  std::string line_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Columns path_id, t, lambda_1..lambda_n; rows ordered by path then time.
void write_trajectories(const std::filesystem::path& file, std::string_view comment,
                        const std::vector<PathResult>& paths, int n);

/// Columns path_id, kind, index, time, level.
void write_events(const std::filesystem::path& file, std::string_view comment, const std::vector<PathResult>& paths);

}  // namespace wishlab

#endif  // WISHLAB_CSV_HPP
