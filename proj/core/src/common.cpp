#include "epp/common.hpp"

#include "epp/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace epp {

namespace {

bool iequals_prefix(std::string_view query, std::string_view name)
{
    if (query.size() > name.size()) return false;
    for (std::size_t i = 0; i < query.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(query[i])) != std::tolower(static_cast<unsigned char>(name[i])))
            return false;
    }
    return true;
}

} // namespace

std::size_t match_unique_prefix(std::string_view query, std::span<const std::string_view> names, std::string_view what)
{
    if (query.empty()) throw ArgumentError("empty " + std::string(what) + " name");
    std::size_t found = names.size();
    int hits = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!iequals_prefix(query, names[i])) continue;
        if (query.size() == names[i].size()) return i;
        found = i;
        ++hits;
    }
    if (hits == 1) return found;
    std::string options;
    for (auto n : names) {
        if (!options.empty()) options += ", ";
        options += n;
    }
    if (hits == 0)
        throw ArgumentError("unknown " + std::string(what) + " '" + std::string(query) + "' (expected one of: " + options + ")");
    throw ArgumentError("ambiguous " + std::string(what) + " '" + std::string(query) + "' (matches several of: " + options + ")");
}

void canonicalize_sign(Eigen::Ref<Vector> v)
{
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            arg = i;
        }
    }
    if (v.size() > 0 && v[arg] < 0) v = -v;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h)
{
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::uint64_t from_hex64(std::string_view text)
{
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw FormatError("invalid 64-bit hex value '" + std::string(text) + "'");
    return value;
}

} // namespace epp
