#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ssf/step_function.hpp"

namespace ssf {

/// SVG step plot of ξ with axis labels, the support interval and a legend
/// carrying ∫ξ and ‖ξ‖₁. ξ ≡ 0 renders as a flat line with an annotation.
std::string render_svg(const StepFunction& xi, std::string_view title = "xi");

/// Throws std::runtime_error when the file cannot be written.
void emit_plot(const StepFunction& xi, const std::filesystem::path& path, std::string_view title = "xi");

}  // namespace ssf
