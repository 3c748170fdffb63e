#pragma once

#include <string>

#include "xylocc/eigensolve.hpp"
#include "xylocc/model.hpp"

namespace xylocc::cache {

/// Directory to use: the explicit argument, else $XYLOCC_CACHE_DIR, else ""
/// (caching disabled).
std::string resolve_dir(const std::string& explicit_dir);

/// Stable content key for one solve: hash of params, sector, resolved solver
/// and tolerances.
std::string key_for(const ChainParams& params, SectorPolicy sector,
                    SolverKind resolved_solver, const SolveOptions& opts);

/// Reads dir/key.gsr into out. False on miss, corrupt entry (bad checksum or
/// shape) or parameter mismatch; corrupt entries are removed.
bool load(const std::string& dir, const std::string& key,
          const ChainParams& params, GroundStateResult& out);

/// Writes the result under dir/key.gsr via a temp file + atomic rename.
/// Failures are swallowed: the cache is an accelerator, never a dependency.
void store(const std::string& dir, const std::string& key,
           const ChainParams& params, const GroundStateResult& result);

}  // namespace xylocc::cache
