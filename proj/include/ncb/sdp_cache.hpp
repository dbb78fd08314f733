// SPDX-License-Identifier: Apache-2.0

#ifndef NCB_SDP_CACHE_HPP
#define NCB_SDP_CACHE_HPP

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "ncb/sdp.hpp"

namespace ncb::sdp {

/// Stable 64-bit FNV-1a digest, used for cache keys.
std::uint64_t fnv1a64(const std::string& text);

/// On-disk cache of SDP solutions keyed by a content hash of the canonical
/// problem text and solver settings. A hit is only returned after the stored
/// blocks pass a residual and PSD re-check against the problem.
class SolutionCache {
 public:
  explicit SolutionCache(std::filesystem::path dir);

  std::optional<Solution> lookup(const Problem& p, const Settings& s);
  void store(const Problem& p, const Settings& s, const Solution& sol);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t rejected() const { return rejected_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::string key(const Problem& p, const Settings& s) const;

  std::filesystem::path dir_;
  std::mutex mu_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace ncb::sdp

#endif  // NCB_SDP_CACHE_HPP
