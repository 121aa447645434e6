// Strict YAML field access shared by the preset and config readers.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dmdeco/error.hpp"

namespace dmdeco::yaml_util
{
inline std::string where(YAML::Node const& node)
{
    auto const mark = node.Mark();
    if (mark.is_null())
        return {};
    return fmt::format("line {}, column {}: ", mark.line + 1, mark.column + 1);
}

[[noreturn]] inline void
fail(YAML::Node const& node, std::string_view field, std::string_view msg)
{
    throw ConfigError(fmt::format("{}{}: {}", where(node), field, msg));
}

inline std::string join(std::string_view block, std::string_view key)
{
    if (block.empty())
        return std::string(key);
    return fmt::format("{}.{}", block, key);
}

//! Require a mapping whose keys all appear in allowed
inline void require_keys(YAML::Node const& map,
                         std::string_view block,
                         std::initializer_list<std::string_view> allowed)
{
    if (!map.IsMap())
        fail(map, block.empty() ? "config" : block, "expected a mapping");
    for (auto const& kv : map)
    {
        auto const key = kv.first.as<std::string>();
        bool known = false;
        for (auto a : allowed)
            known = known || key == a;
        if (!known)
            fail(kv.first, join(block, key), "unknown key");
    }
}

inline double as_double(YAML::Node const& node, std::string_view field)
{
    if (!node.IsScalar())
        fail(node, field, "expected a number");
    try
    {
        return node.as<double>();
    }
    catch (YAML::Exception const&)
    {
        fail(node, field, fmt::format("'{}' is not a number", node.Scalar()));
    }
}

inline std::uint64_t as_count(YAML::Node const& node, std::string_view field)
{
    if (!node.IsScalar())
        fail(node, field, "expected a non-negative integer");
    try
    {
        return node.as<std::uint64_t>();
    }
    catch (YAML::Exception const&)
    {
        fail(node,
             field,
             fmt::format("'{}' is not a non-negative integer", node.Scalar()));
    }
}

inline bool as_bool(YAML::Node const& node, std::string_view field)
{
    if (!node.IsScalar())
        fail(node, field, "expected true or false");
    try
    {
        return node.as<bool>();
    }
    catch (YAML::Exception const&)
    {
        fail(node, field, fmt::format("'{}' is not a boolean", node.Scalar()));
    }
}

inline std::string as_string(YAML::Node const& node, std::string_view field)
{
    if (!node.IsScalar())
        fail(node, field, "expected a string");
    return node.Scalar();
}

//! Shortest text that parses back to the same double
inline std::string exact(double value)
{
    return fmt::format("{}", value);
}
}  // namespace dmdeco::yaml_util
