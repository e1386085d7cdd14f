#pragma once

#include <stdexcept>
#include <string>

namespace greenflow {

struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct invalid_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct stability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct calibration_failure : std::runtime_error {
  calibration_failure(const std::string& msg, std::string row)
      : std::runtime_error(msg), worst_row(std::move(row)) {}
  std::string worst_row;
};

struct unsupported_policy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct range_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct encoding_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct schema_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct shape_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct empty_dataset_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct training_divergence : std::runtime_error {
  training_divergence(const std::string& msg, double last_loss)
      : std::runtime_error(msg), last_finite_loss(last_loss) {}
  double last_finite_loss;
};

struct generation_starvation : std::runtime_error {
  generation_starvation(const std::string& msg, std::size_t accepted, std::size_t drawn)
      : std::runtime_error(msg), accepted(accepted), drawn(drawn) {}
  std::size_t accepted;
  std::size_t drawn;
};

struct missing_artifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct normalization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct coverage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace greenflow
