// Data files compiled into the library.
#pragma once

#include <string_view>

namespace dmdeco::embedded
{
extern std::string_view const targets_yaml;
extern std::string_view const atmosphere_csv;
}  // namespace dmdeco::embedded
