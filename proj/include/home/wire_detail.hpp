#pragma once

#include <string_view>
#include <vector>

#include "home/wire.hpp"

namespace home::wire_detail {

/// Recoverable: the envelope was framed correctly but its JSON is bad.
WireMessage parse_payload(std::string_view payload);
/// Not recoverable: without valid sizes the stream cannot be resynchronized.
std::vector<std::uint64_t> blob_sizes(const nlohmann::json& body);
/// False on EOF before the first byte.
bool read_exact(int fd, char* out, std::size_t n);
void write_all(int fd, std::string_view data);

}  // namespace home::wire_detail
