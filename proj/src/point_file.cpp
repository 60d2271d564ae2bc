#include "detthin/point_file.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "detthin/errors.hpp"

namespace detthin {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw PreconditionError("bad number in point file header: " + std::string(s));
  }
  return v;
}

PointFile parse_header(std::string_view line) {
  PointFile f;
  if (line == "circle") {
    f.circle = true;
    return f;
  }
  std::size_t dim = 0;
  std::string_view box_text;
  for (std::string_view token : split(line, ' ')) {
    if (token.empty()) continue;
    if (token.starts_with("dim=")) {
      const auto text = token.substr(4);
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), dim);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw PreconditionError("bad dimension in point file header");
      }
    } else if (token.starts_with("box=")) {
      box_text = token.substr(4);
    } else {
      throw PreconditionError("unknown point file header field: " + std::string(token));
    }
  }
  if (dim == 0 || box_text.empty()) {
    throw PreconditionError("point file header needs dim=<d> box=<lo..hi,...> or 'circle'");
  }
  std::vector<double> lo, hi;
  for (std::string_view range : split(box_text, ',')) {
    const auto dots = range.find("..");
    if (dots == std::string_view::npos) throw PreconditionError("box range needs lo..hi");
    lo.push_back(parse_double(range.substr(0, dots)));
    hi.push_back(parse_double(range.substr(dots + 2)));
  }
  if (lo.size() != dim) throw PreconditionError("box ranges do not match dim");
  try {
    f.box = BoxSpec(lo, hi);
  } catch (const DomainError& e) {
    throw PreconditionError(e.what());
  }
  return f;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

PointFile parse_point_file(std::istream& in) {
  std::string line;
  bool have_header = false;
  PointFile f;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!have_header) {
      f = parse_header(body);
      have_header = true;
      continue;
    }
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = trim(body.substr(0, hash));
    }
    const auto fields = split(body, ',');
    if (fields.size() != f.dimension()) {
      throw PreconditionError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(f.dimension()) + " hex fields");
    }
    BoxPoint p;
    for (std::string_view field : fields) {
      if (!field.starts_with("0x") && !field.starts_with("0X")) {
        throw PreconditionError("line " + std::to_string(line_no) + ": fields must be 0x hex fractions");
      }
      try {
        p.push_back(UnitPoint{parse_hex128(field)});
      } catch (const DomainError& e) {
        throw PreconditionError("line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!f.circle && p.back().bits == 0) {
        throw DomainError("line " + std::to_string(line_no) + ": point lies on the box boundary");
      }
    }
    f.points.push_back(std::move(p));
  }
  if (!have_header) throw PreconditionError("point file has no header");
  return f;
}

PointFile read_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open point file: " + path);
  return parse_point_file(in);
}

void write_point_file(std::ostream& out, const PointFile& file) {
  if (file.circle) {
    out << "circle\n";
  } else {
    out << "dim=" << file.box.dimension() << " box=";
    for (std::size_t a = 0; a < file.box.dimension(); ++a) {
      if (a) out << ',';
      out << format_double(file.box.lower[a]) << ".." << format_double(file.box.upper[a]);
    }
    out << '\n';
  }
  for (const BoxPoint& p : file.points) {
    std::ostringstream decimals;
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (a) out << ',';
      out << to_hex(p[a].bits);
      const double x = file.circle ? p[a].to_double() : file.box.coordinate(p[a], a);
      decimals << (a ? " " : "") << format_double(x);
    }
    out << " # " << decimals.str() << '\n';
  }
}

}  // namespace detthin
