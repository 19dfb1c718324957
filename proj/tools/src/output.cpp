#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "fockmarket/errors.hpp"
#include "fockmarket_cli/run.hpp"

namespace fockmarket::cli {

std::string sha256_hex(const std::string& content) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(content.data(), content.size(), digest.data(), &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string out;
  for (unsigned int i = 0; i < length; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string manifest(const OutputFiles& files) {
  std::string out;
  for (const auto& [name, content] : files) out += name + "=" + sha256_hex(content) + "\n";
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#17becf"};

}  // namespace

std::optional<std::string> csv_to_svg(const std::string& csv, const std::string& title) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const auto header = split(line, ',');
  if (header.size() < 2) return std::nullopt;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) return std::nullopt;
    std::vector<double> row;
    for (const auto& c : cells) {
      const auto v = to_double(c);
      if (!v || !std::isfinite(*v)) return std::nullopt;
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) return std::nullopt;

  double x0 = rows.front()[0], x1 = rows.back()[0];
  double y0 = rows[0][1], y1 = rows[0][1];
  for (const auto& r : rows) {
    for (std::size_t c = 1; c < r.size(); ++c) {
      y0 = std::min(y0, r[c]);
      y1 = std::max(y1, r[c]);
    }
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  if (x1 <= x0) return std::nullopt;

  constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 36, kBottom = 44;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">{3}</text>\n",
      kW, kH, kLeft, escape(title));
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
      kLeft, kTop, kW - kLeft - kRight, kH - kTop - kBottom);
  auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"{}\">{}</text>\n",
        x, y, anchor, escape(text));
  };
  label(kLeft - 6, py(y0) + 4, fmt::format("{:.4g}", y0), "end");
  label(kLeft - 6, py(y1) + 4, fmt::format("{:.4g}", y1), "end");
  label(px(x0), kH - kBottom + 16, fmt::format("{:.4g}", x0), "middle");
  label(px(x1), kH - kBottom + 16, fmt::format("{:.4g}", x1), "middle");
  label((kLeft + kW - kRight) / 2, kH - 8, header[0], "middle");
  if (y0 < 0.0 && y1 > 0.0) {
    svg += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#bbb\" "
        "stroke-dasharray=\"4 3\"/>\n",
        px(x0), py(0.0), px(x1), py(0.0));
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    const char* color = kPalette[(c - 1) % kPalette.size()];
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                       color);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) svg += ' ';
      svg += fmt::format("{:.2f},{:.2f}", px(rows[i][0]), py(rows[i][c]));
    }
    svg += "\"/>\n";
    const double ly = kTop + 14 + 14 * static_cast<double>(c - 1);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "fill=\"{}\" text-anchor=\"end\">{}</text>\n",
        kW - kRight - 6, ly, color, escape(header[c]));
  }
  svg += "</svg>\n";
  return svg;
}

void write_outputs(const std::filesystem::path& dir, OutputFiles files, bool plots) {
  if (plots) {
    OutputFiles images;
    for (const auto& [name, content] : files) {
      if (!name.ends_with(".csv")) continue;
      const std::string stem = name.substr(0, name.size() - 4);
      if (auto svg = csv_to_svg(content, stem)) images[stem + ".svg"] = std::move(*svg);
    }
    files.merge(images);
  }
  files["manifest.txt"] = manifest(files);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(),
                                  ec.message()));
  for (const auto& [name, content] : files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error(fmt::format("cannot write '{}'", (dir / name).string()));
  }
}

}  // namespace fockmarket::cli
