#include <charconv>
#include <cmath>

#include "qent/cli.hpp"

namespace qent::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error(ErrorKind::IoError, "number formatting failed");
  return std::string(buf, ptr);
}

namespace {

void cell(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) out += format_number(*v);
}

}  // namespace

std::string render_trace_csv(const entropy::EntropyTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& row : trace.rows) {
    out += format_number(row.t);
    cell(out, row.s_x);
    cell(out, row.s_p);
    cell(out, row.s_joint_numeric);
    cell(out, row.s_joint_closed);
    cell(out, row.deficit_x);
    cell(out, row.deficit_p);
    out += row.caustic ? ",1\n" : ",0\n";
  }
  for (const auto& row : trace.rows) {
    if (row.error) out += "# error t=" + format_number(row.t) + ": " + *row.error + "\n";
  }
  return out;
}

}  // namespace qent::cli
