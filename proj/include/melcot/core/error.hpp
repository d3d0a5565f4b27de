#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace melcot {

// Error codes double as drop-reason tags in stage manifests, so the string
// forms are stable identifiers.
enum class Errc {
  io,
  config,
  stage_order,
  data_validation,
  endpoint,
  template_error,
  malformed,
  commit_not_found,
  file_not_found,
  state_mismatch,
  parse_failed,
  span_out_of_range,
  unsupported_language,
  documentation,
  budget_too_small,
  label_outside_window,
  empty_label,
  import_error,
  incomplete_group,
  generation_failed,
  invalid_argument,
};

constexpr std::string_view to_string(Errc c) noexcept {
  switch (c) {
    case Errc::io: return "io";
    case Errc::config: return "config";
    case Errc::stage_order: return "stage_order";
    case Errc::data_validation: return "data_validation";
    case Errc::endpoint: return "endpoint";
    case Errc::template_error: return "template_error";
    case Errc::malformed: return "malformed";
    case Errc::commit_not_found: return "commit_not_found";
    case Errc::file_not_found: return "file_not_found";
    case Errc::state_mismatch: return "state_mismatch";
    case Errc::parse_failed: return "parse_failed";
    case Errc::span_out_of_range: return "span_out_of_range";
    case Errc::unsupported_language: return "unsupported_language";
    case Errc::documentation: return "documentation";
    case Errc::budget_too_small: return "budget_too_small";
    case Errc::label_outside_window: return "label_outside_window";
    case Errc::empty_label: return "empty_label";
    case Errc::import_error: return "import_error";
    case Errc::incomplete_group: return "incomplete_group";
    case Errc::generation_failed: return "generation_failed";
    case Errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace melcot
