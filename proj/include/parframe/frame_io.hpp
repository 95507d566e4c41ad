#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "parframe/frame.hpp"

namespace parframe::io {

/// A frame of either scalar field, as read from the text format.
using AnyFrame = std::variant<RealFrame, ComplexFrame>;

/// Plain matrix text format: first line "k n field" with field in
/// {real, complex}, then k rows of n whitespace-separated scalars
/// (complex written as "a+bi").
AnyFrame read_frame(std::istream& in);
AnyFrame load_frame(const std::string& path);

void write_frame(std::ostream& out, const RealFrame& f);
void write_frame(std::ostream& out, const ComplexFrame& f);
void write_frame(std::ostream& out, const AnyFrame& f);
void save_frame(const std::string& path, const AnyFrame& f);

std::string format_scalar(double x);
std::string format_scalar(const Complex& z);

}  // namespace parframe::io
