#include "contact_opt/export.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "contact_opt/errors.hpp"

namespace contact {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                const std::string& header, std::size_t columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw IoError("'" + path.string() + "': expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto parts = split(line, ',');
    if (parts.size() != columns)
      throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": expected " +
                    std::to_string(columns) + " fields");
    rows.push_back(std::move(parts));
  }
  return rows;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad integer '" + s + "'");
  return v;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string fixed(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw IoError("bad number '" + text + "'");
  return v;
}

std::string trace_csv(const std::vector<RunRecord>& records) {
  std::string out = "optimizer,trial,iter,f_gap,diverged\n";
  for (const auto& rec : records) {
    const std::string name(to_string(rec.kind));
    const std::string trial = std::to_string(rec.trial);
    const char* div = rec.diverged ? "1" : "0";
    for (std::size_t k = 0; k < rec.trace.size(); ++k) {
      out += name;
      out += ',';
      out += trial;
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += format_double(rec.trace[k]);
      out += ',';
      out += div;
      out += '\n';
    }
  }
  return out;
}

void export_trace_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  write_file(path, trace_csv(records));
}

std::vector<TraceSeries> read_trace_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path, "optimizer,trial,iter,f_gap,diverged", 5);
  std::vector<TraceSeries> out;
  std::map<std::pair<std::string, int>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r[0], parse_int(r[1]));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back(TraceSeries{key.first, key.second, false, {}});
    }
    auto& series = out[it->second];
    const int iter = parse_int(r[2]);
    if (iter != static_cast<int>(series.trace.size()))
      throw IoError("'" + path.string() + "': iterations out of order for " + key.first);
    series.trace.push_back(parse_double(r[3]));
    series.diverged = series.diverged || r[4] == "1";
  }
  return out;
}

std::string band_csv(const std::vector<QuantileBand>& bands) {
  std::string out = "optimizer,iter,median,q025,q975\n";
  for (const auto& b : bands) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      out += b.optimizer + ',' + std::to_string(k) + ',' + format_double(b.median[k]) + ',' +
             format_double(b.q025[k]) + ',' + format_double(b.q975[k]) + '\n';
    }
  }
  return out;
}

void export_band_csv(const std::vector<QuantileBand>& bands, const std::filesystem::path& path) {
  write_file(path, band_csv(bands));
}

std::vector<QuantileBand> read_band_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path, "optimizer,iter,median,q025,q975", 5);
  std::vector<QuantileBand> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto it = index.find(r[0]);
    if (it == index.end()) {
      it = index.emplace(r[0], out.size()).first;
      out.push_back(QuantileBand{r[0], {}, {}, {}});
    }
    auto& b = out[it->second];
    if (parse_int(r[1]) != static_cast<int>(b.size()))
      throw IoError("'" + path.string() + "': iterations out of order for " + r[0]);
    b.median.push_back(parse_double(r[2]));
    b.q025.push_back(parse_double(r[3]));
    b.q975.push_back(parse_double(r[4]));
  }
  return out;
}

std::string render_svg(const std::vector<QuantileBand>& bands, const SvgOptions& opt) {
  if (bands.empty()) throw InvalidParameter("export_svg: at least one band is required");
  static constexpr std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c",
                                                     "#9467bd", "#ff7f0e", "#17becf"};
  static constexpr std::array<const char*, 4> dashes{"none", "6,3", "2,2", "8,3,2,3"};

  const double left = 70, right = 140, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  // Decade range over all finite values; +inf and non-positive values clamp.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t length = 1;
  auto scan = [&](double v) {
    if (!std::isfinite(v)) return;
    const double l = std::log10(std::max(v, opt.floor));
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  };
  for (const auto& b : bands) {
    length = std::max(length, b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
      scan(b.q025[k]);
      scan(b.median[k]);
      scan(b.q975[k]);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  double ylo = std::floor(lo), yhi = std::ceil(hi);
  if (yhi <= ylo) yhi = ylo + 1.0;

  auto px = [&](std::size_t k) {
    const double span = length > 1 ? static_cast<double>(length - 1) : 1.0;
    return left + pw * static_cast<double>(k) / span;
  };
  auto py = [&](double v) {
    double l;
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      l = yhi;
    } else {
      l = std::clamp(std::log10(std::max(v, opt.floor)), ylo, yhi);
    }
    return top + ph * (yhi - l) / (yhi - ylo);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(opt.title) << "</text>\n";

  // Axes and decade ticks.
  os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  os << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + ph) << "\" x2=\""
     << fixed(left + pw) << "\" y2=\"" << fixed(top + ph) << "\"/>\n";
  os << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left)
     << "\" y2=\"" << fixed(top + ph) << "\"/>\n";
  os << "</g>\n";
  const int decade_step = std::max(1, static_cast<int>((yhi - ylo) / 8.0));
  os << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int d = static_cast<int>(ylo); d <= static_cast<int>(yhi); d += decade_step) {
    const double y = top + ph * (yhi - d) / (yhi - ylo);
    os << "<line x1=\"" << fixed(left - 4) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left)
       << "\" y2=\"" << fixed(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 3)
       << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(length - 1) * i / 4.0));
    os << "<text x=\"" << fixed(px(k)) << "\" y=\"" << fixed(top + ph + 14)
       << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(top + ph + 34)
     << "\" text-anchor=\"middle\">iteration</text>\n";
  os << "<text x=\"16\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fixed(top + ph / 2) << ")\">f - f*</text>\n";
  os << "</g>\n";

  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& band = bands[b];
    const char* color = colors[b % colors.size()];
    const char* dash = dashes[b % dashes.size()];
    os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < band.size(); ++k) os << fixed(px(k)) << ',' << fixed(py(band.q975[k])) << ' ';
    for (std::size_t k = band.size(); k-- > 0;) os << fixed(px(k)) << ',' << fixed(py(band.q025[k])) << ' ';
    os << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (std::string(dash) != "none") os << " stroke-dasharray=\"" << dash << "\"";
    os << " points=\"";
    for (std::size_t k = 0; k < band.size(); ++k) os << fixed(px(k)) << ',' << fixed(py(band.median[k])) << ' ';
    os << "\"/>\n";

    const double ly = top + 14 + 18.0 * static_cast<double>(b);
    const double lx = left + pw + 12;
    os << "<g class=\"legend\">";
    os << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 24)
       << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (std::string(dash) != "none") os << " stroke-dasharray=\"" << dash << "\"";
    os << "/>";
    os << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(band.optimizer)
       << "</text></g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void export_svg(const std::vector<QuantileBand>& bands, const std::filesystem::path& path,
                const SvgOptions& options) {
  write_file(path, render_svg(bands, options));
}

}  // namespace contact
