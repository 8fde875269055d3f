#pragma once

#include <string>
#include <string_view>

namespace hgcoop {

// Whole-file read; throws InvalidInput when the file cannot be opened.
std::string read_text_file(const std::string& path);
// Creates parent directories as needed; throws InvalidInput on failure.
void write_text_file(const std::string& path, std::string_view text);

}  // namespace hgcoop
