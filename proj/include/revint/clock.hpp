#pragma once

#include <string>

namespace revint {

/// Current UTC time as RFC-3339 with millisecond precision, e.g.
/// "2024-05-01T12:30:00.123Z".
std::string now_rfc3339();

/// Random 128-bit identifier rendered as 32 lowercase hex digits.
std::string new_id();

}  // namespace revint
