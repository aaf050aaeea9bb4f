#pragma once

// Text formats for workloads ("ALPIR v1") and traces ("ALPTRACE v1").
// Serialization is canonical: parse(serialize(x)) == x and
// serialize(parse(text)) == text for canonical text.

#include <iosfwd>
#include <string>
#include <string_view>

#include "alp/ir.hpp"

namespace alp {

inline constexpr std::string_view kProgramHeader = "ALPIR v1";
inline constexpr std::string_view kTraceHeader = "ALPTRACE v1";

std::string serialize_workload(const Workload& w);
Workload parse_workload(std::string_view text);

std::string serialize_trace(const DynamicTrace& t);
void write_trace(std::ostream& os, const DynamicTrace& t);
DynamicTrace parse_trace(std::string_view text);

std::string hex(std::uint64_t v);
std::uint64_t parse_u64(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace alp
