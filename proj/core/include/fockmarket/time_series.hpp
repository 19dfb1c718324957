#pragma once

#include <span>
#include <string>
#include <vector>

namespace fockmarket {

// Sampled trajectory (t, value). Times are strictly increasing.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::string label) : label_(std::move(label)) {}
  TimeSeries(std::string label, std::vector<double> times, std::vector<double> values);

  void append(double t, double value);

  const std::string& label() const { return label_; }
  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_.at(i); }
  double value(std::size_t i) const { return values_.at(i); }

  // max_i |value_i - value_0|
  double max_drift() const;

  // Header "t,<label>", one row per sample, 12 significant digits.
  std::string to_csv() const;

 private:
  std::string label_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// `samples` uniform points on [0, t_max] (both ends included).
std::vector<double> uniform_grid(double t_max, std::size_t samples);

// Formats a double with 12 significant digits; -0 is printed as 0.
std::string format_number(double value);

}  // namespace fockmarket
