#include "cache.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <unistd.h>

namespace xylocc::cache {

namespace {

constexpr char kMagic[8] = {'X', 'Y', 'G', 'S', 'C', 'H', '0', '1'};

std::uint64_t fnv1a(const unsigned char* data, std::size_t n,
                    std::uint64_t h = 0xcbf29ce484222325ull) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

struct Buffer {
  std::vector<unsigned char> bytes;

  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }

  void put_vector(const Eigen::VectorXd& v) {
    put<std::uint64_t>(v.size());
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    bytes.insert(bytes.end(), p, p + sizeof(double) * v.size());
  }
};

struct Reader {
  const unsigned char* p;
  const unsigned char* end;

  template <typename T>
  bool get(T& v) {
    if (p + sizeof(T) > end) return false;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return true;
  }

  bool get_vector(Eigen::VectorXd& v) {
    std::uint64_t n = 0;
    if (!get(n)) return false;
    if (n > (std::uint64_t{1} << kMaxSites)) return false;
    if (p + sizeof(double) * n > end) return false;
    v.resize(static_cast<Eigen::Index>(n));
    std::memcpy(v.data(), p, sizeof(double) * n);
    p += sizeof(double) * n;
    return true;
  }
};

}  // namespace

std::string resolve_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("XYLOCC_CACHE_DIR")) return env;
  return {};
}

std::string key_for(const ChainParams& params, SectorPolicy sector,
                    SolverKind resolved_solver, const SolveOptions& opts) {
  std::ostringstream desc;
  desc << "gsr1|n=" << params.n_sites << "|gamma=" << std::hexfloat
       << params.gamma << "|g=" << params.g << std::defaultfloat
       << "|bc=" << (params.boundary == Boundary::periodic ? 'p' : 'o')
       << "|sector=" << static_cast<int>(sector)
       << "|solver=" << static_cast<int>(resolved_solver)
       << "|maxit=" << opts.max_iterations << "|rtol=" << std::hexfloat
       << opts.residual_tol << "|dtol=" << opts.degeneracy_tol
       << std::defaultfloat << "|seed=" << opts.seed;
  const std::string s = desc.str();
  const std::uint64_t h =
      fnv1a(reinterpret_cast<const unsigned char*>(s.data()), s.size());
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

bool load(const std::string& dir, const std::string& key,
          const ChainParams& params, GroundStateResult& out) {
  if (dir.empty()) return false;
  const std::filesystem::path path =
      std::filesystem::path(dir) / (key + ".gsr");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) return false;

  std::vector<unsigned char> bytes(size);
  {
    std::ifstream in(path, std::ios::binary);
    if (!in.read(reinterpret_cast<char*>(bytes.data()),
                 static_cast<std::streamsize>(size))) {
      return false;
    }
  }

  auto reject = [&] {
    std::filesystem::remove(path, ec);
    return false;
  };

  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t)) return reject();
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) return reject();

  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored_sum = 0;
  std::memcpy(&stored_sum, bytes.data() + body, sizeof stored_sum);
  if (fnv1a(bytes.data(), body) != stored_sum) return reject();

  Reader r{bytes.data() + sizeof(kMagic), bytes.data() + body};
  std::int32_t n_sites = 0, boundary = 0, parity = 0, solver = 0, iters = 0;
  double gamma = 0, g = 0;
  std::uint8_t degenerate = 0, has_partner = 0;
  GroundStateResult res;
  if (!r.get(n_sites) || !r.get(gamma) || !r.get(g) || !r.get(boundary) ||
      !r.get(parity) || !r.get(res.energy) || !r.get(res.gap) ||
      !r.get(degenerate) || !r.get(solver) || !r.get(iters) ||
      !r.get_vector(res.vector) || !r.get(has_partner)) {
    return reject();
  }
  if (has_partner && !r.get_vector(res.partner)) return reject();

  if (n_sites != params.n_sites ||
      std::bit_cast<std::uint64_t>(gamma) !=
          std::bit_cast<std::uint64_t>(params.gamma) ||
      std::bit_cast<std::uint64_t>(g) !=
          std::bit_cast<std::uint64_t>(params.g)) {
    return reject();
  }

  res.degenerate = degenerate != 0;
  res.parity = parity >= 0 ? Parity::even : Parity::odd;
  res.solver_used = static_cast<SolverKind>(solver);
  res.iterations = iters;
  res.from_cache = true;
  out = std::move(res);
  return true;
}

void store(const std::string& dir, const std::string& key,
           const ChainParams& params, const GroundStateResult& result) {
  if (dir.empty()) return;
  try {
    std::filesystem::create_directories(dir);

    Buffer buf;
    buf.bytes.insert(buf.bytes.end(), kMagic, kMagic + sizeof(kMagic));
    buf.put<std::int32_t>(params.n_sites);
    buf.put<double>(params.gamma);
    buf.put<double>(params.g);
    buf.put<std::int32_t>(params.boundary == Boundary::periodic ? 0 : 1);
    buf.put<std::int32_t>(result.parity == Parity::even ? 1 : -1);
    buf.put<double>(result.energy);
    buf.put<double>(result.gap);
    buf.put<std::uint8_t>(result.degenerate ? 1 : 0);
    buf.put<std::int32_t>(static_cast<std::int32_t>(result.solver_used));
    buf.put<std::int32_t>(result.iterations);
    buf.put_vector(result.vector);
    buf.put<std::uint8_t>(result.partner.size() > 0 ? 1 : 0);
    if (result.partner.size() > 0) buf.put_vector(result.partner);
    buf.put<std::uint64_t>(fnv1a(buf.bytes.data(), buf.bytes.size()));

    const std::filesystem::path dest =
        std::filesystem::path(dir) / (key + ".gsr");
    const std::filesystem::path tmp =
        dest.string() + ".tmp" + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(buf.bytes.data()),
                static_cast<std::streamsize>(buf.bytes.size()));
      if (!out) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        return;
      }
    }
    std::filesystem::rename(tmp, dest);
  } catch (...) {
    // cache failures never surface
  }
}

}  // namespace xylocc::cache
