#include "fockmarket/time_series.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fockmarket/errors.hpp"

namespace fockmarket {

TimeSeries::TimeSeries(std::string label, std::vector<double> times,
                       std::vector<double> values)
    : label_(std::move(label)) {
  if (times.size() != values.size()) {
    throw Error(fmt::format("time series '{}': {} times but {} values", label_,
                            times.size(), values.size()));
  }
  for (std::size_t i = 0; i < times.size(); ++i) append(times[i], values[i]);
}

void TimeSeries::append(double t, double value) {
  if (!times_.empty() && !(t > times_.back())) {
    throw Error(fmt::format("time series '{}': times must be strictly increasing", label_));
  }
  times_.push_back(t);
  values_.push_back(value);
}

double TimeSeries::max_drift() const {
  double out = 0.0;
  for (double v : values_) out = std::max(out, std::abs(v - values_.front()));
  return out;
}

std::string TimeSeries::to_csv() const {
  std::string out = fmt::format("t,{}\n", label_);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    out += format_number(times_[i]);
    out += ',';
    out += format_number(values_[i]);
    out += '\n';
  }
  return out;
}

std::vector<double> uniform_grid(double t_max, std::size_t samples) {
  if (samples < 2) throw Error("a time grid needs at least two samples");
  if (!(t_max > 0.0)) throw Error("t_max must be positive");
  std::vector<double> out(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    out[i] = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{:.12g}", value);
}

}  // namespace fockmarket
