#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aperiodiq/catalog.hpp"

namespace aperiodiq {

// Line-oriented .sub format; see docs/file-format.md. InputError carries the line number.
SubstitutionFile parse_substitution(std::string_view text, const std::string& origin = "<input>");
// InputError when the file cannot be read
SubstitutionFile load_substitution(const std::filesystem::path& path);
// canonical text; parse_substitution(serialize_substitution(f)) reproduces f
std::string serialize_substitution(const SubstitutionFile& f);

bool same_structure(const SubstitutionFile& a, const SubstitutionFile& b);

}  // namespace aperiodiq
