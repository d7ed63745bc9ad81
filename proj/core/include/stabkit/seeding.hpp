#pragma once

#include <cstdint>
#include <initializer_list>

namespace stabkit {

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based stream split: the same (master, keys...) always gives the
/// same child seed, independent of how many other streams were derived.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

}  // namespace stabkit
