#include "wishlab/csv.hpp"

#include <charconv>
#include <cmath>

#include "wishlab/error.hpp"

namespace wishlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& file, std::string_view comment,
                     const std::vector<std::string>& header)
    : path_(file), os_(file, std::ios::binary), columns_(header.size()) {
  if (!os_) throw ConfigError("out", "cannot open " + file.string() + " for writing");
  os_ << "# " << comment << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::cell(std::string_view v) {
  if (filled_++) line_ += ',';
  line_ += v;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_)
    throw DomainError(path_.string() + ": row has " + std::to_string(filled_) + " cells, header has " +
                      std::to_string(columns_));
  line_ += '\n';
  os_ << line_;
  line_.clear();
  filled_ = 0;
}

void CsvWriter::close() {
  os_.close();
  if (!os_) throw ConfigError("out", "failed writing " + path_.string());
}

void write_trajectories(const std::filesystem::path& file, std::string_view comment,
                        const std::vector<PathResult>& paths, int n) {
  std::vector<std::string> header{"path_id", "t"};
  for (int i = 1; i <= n; ++i) header.push_back("lambda_" + std::to_string(i));
  CsvWriter w(file, comment, header);
  for (const PathResult& p : paths) {
    const PathRecord& r = p.record;
    for (std::size_t k = 0; k < r.size(); ++k) {
      w.cell(r.path_index).cell(r.times[k]);
      for (double x : r.state(k)) w.cell(x);
      w.end_row();
    }
  }
  w.close();
}

void write_events(const std::filesystem::path& file, std::string_view comment, const std::vector<PathResult>& paths) {
  CsvWriter w(file, comment, {"path_id", "kind", "index", "time", "level"});
  for (const PathResult& p : paths) {
    for (const Event& e : p.events.events) {
      w.cell(p.record.path_index).cell(to_string(e.kind)).cell(e.index).cell(e.time).cell(e.level);
      w.end_row();
    }
  }
  w.close();
}

}  // namespace wishlab
