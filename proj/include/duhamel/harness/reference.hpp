#pragma once

#include <openssl/evp.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "duhamel/equations.hpp"
#include "duhamel/error.hpp"
#include "duhamel/field.hpp"
#include "duhamel/harness/config.hpp"
#include "duhamel/integrators.hpp"

namespace duhamel::harness {

static_assert(std::endian::native == std::endian::little, "the cache format is written in native little-endian order");

/// Incremental SHA-256 over raw bytes.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
            throw Error(ErrorCode::IoError, "cannot initialise SHA-256");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(const void* data, std::size_t n) {
        EVP_DigestUpdate(ctx_, data, n);
        return *this;
    }
    Sha256& update(const std::string& s) { return update(s.data(), s.size()); }
    Sha256& update(std::span<const Complex> v) { return update(v.data(), v.size_bytes()); }

    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        std::string out;
        for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

inline std::string checksum(const SpectralField& f) { return Sha256().update(f.values()).hex(); }

/// Canonical text of everything that determines the reference besides u₀.
inline std::string describe(const EquationSpec& eq, double t_end, double tau_ref) {
    const auto& p = eq.params;
    const auto& g = *eq.grid;
    return fmt::format("duhamel-ref-v1|{}|alpha={:a},{:a}|gamma={:a},{:a}|mass={:a}|sign={}|power={}|jac={}|grid={},{},{}|"
                       "t_end={:a}|tau_ref={:a}",
                       eq.name, p.alpha.real(), p.alpha.imag(), p.gamma.real(), p.gamma.imag(), p.mass, p.sign,
                       p.power, to_string(p.jacobian), to_string(g.kind()), g.dim(), g.modes_per_dim(), t_end,
                       tau_ref);
}

inline std::string cache_key(const EquationSpec& eq, const SpectralField& u0, double t_end, double tau_ref) {
    return Sha256().update(describe(eq, t_end, tau_ref)).update(u0.values()).hex();
}

/// Binary cache file, little-endian:
///   magic "DUHREF01" | u32 kind | u32 dim | u32 modes | u32 reserved
///   | f64 tau_ref | f64 cross-check difference (NaN if none) | u64 count
///   | count × (f64 re, f64 im)
struct CacheEntry {
    SpectralField field;
    double tau_ref = 0.0;
    double cross_check_diff = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr char kCacheMagic[8] = {'D', 'U', 'H', 'R', 'E', 'F', '0', '1'};

namespace detail {
template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
} // namespace detail

/// Writes through a temporary file and renames it into place, so readers
/// never observe a partial entry.
inline void write_cache_entry(const std::filesystem::path& path, const CacheEntry& e) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ostringstream tid;
    tid << std::this_thread::get_id();
    const fs::path tmp = path.string() + ".tmp." + tid.str();
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorCode::IoError, "cannot write cache file '" + tmp.string() + "'");
        const Grid& g = e.field.grid();
        os.write(kCacheMagic, sizeof(kCacheMagic));
        detail::put<std::uint32_t>(os, g.kind() == GridKind::PeriodicTorus ? 0u : 1u);
        detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
        detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.modes_per_dim()));
        detail::put<std::uint32_t>(os, 0u);
        detail::put<double>(os, e.tau_ref);
        detail::put<double>(os, e.cross_check_diff);
        detail::put<std::uint64_t>(os, e.field.size());
        os.write(reinterpret_cast<const char*>(e.field.values().data()),
                 static_cast<std::streamsize>(e.field.values().size_bytes()));
        if (!os) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot move cache file into place: " + ec.message());
}

/// Reads an entry; returns nullopt when the file is absent or does not match `grid`.
inline std::optional<CacheEntry> read_cache_entry(const std::filesystem::path& path, const GridPtr& grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) return std::nullopt;
    const auto kind = detail::get<std::uint32_t>(is);
    const auto dim = detail::get<std::uint32_t>(is);
    const auto modes = detail::get<std::uint32_t>(is);
    detail::get<std::uint32_t>(is);
    CacheEntry e;
    e.tau_ref = detail::get<double>(is);
    e.cross_check_diff = detail::get<double>(is);
    const auto count = detail::get<std::uint64_t>(is);
    const bool match = kind == (grid->kind() == GridKind::PeriodicTorus ? 0u : 1u) &&
                       dim == static_cast<std::uint32_t>(grid->dim()) &&
                       modes == static_cast<std::uint32_t>(grid->modes_per_dim()) && count == grid->size();
    if (!is || !match) return std::nullopt;
    e.field = SpectralField(grid);
    is.read(reinterpret_cast<char*>(e.field.values().data()), static_cast<std::streamsize>(e.field.values().size_bytes()));
    if (!is) return std::nullopt;
    return e;
}

struct ReferenceInfo {
    std::string scheme = "duhamel2";
    double tau_ref = 0.0;
    std::uint64_t steps = 0;
    std::string checksum;
    std::string cache_key;
    bool cache_hit = false;
    std::optional<std::string> cross_check_scheme;
    std::optional<double> cross_check_diff;
    double seconds = 0.0;
    bool operator==(const ReferenceInfo&) const = default;
};

struct ReferenceResult {
    SpectralField field;
    ReferenceInfo info;
};

/// τ_ref = min(taus)/factor, shrunk so that t_end is an integer number of steps.
inline double reference_step(double min_tau, double factor, double t_end) {
    const double target = min_tau / factor;
    if (t_end <= 0.0) return target;
    return t_end / std::ceil(t_end / target * (1.0 - 1e-12));
}

/// u(t_end) by duhamel2 at tau_ref, optionally cross-checked against a second
/// scheme at the same step and cached on disk under `cache_dir`.
inline ReferenceResult reference_solution(const EquationSpec& eq, const SpectralField& u0, double t_end,
                                          double tau_ref, const ReferencePolicy& policy,
                                          const std::optional<std::filesystem::path>& cache_dir = {}) {
    require(t_end >= 0.0, ErrorCode::BadParams, "t_end must be nonnegative");
    const auto start = std::chrono::steady_clock::now();
    ReferenceResult r;
    r.info.tau_ref = tau_ref;
    if (t_end == 0.0) {
        r.field = u0;
        r.info.checksum = checksum(u0);
        return r;
    }
    r.info.steps = step_count(tau_ref, t_end);
    r.info.cache_key = cache_key(eq, u0, t_end, tau_ref);
    std::optional<std::filesystem::path> path;
    if (cache_dir && policy.cache) path = *cache_dir / (r.info.cache_key + ".field");

    const bool check = policy.cross_check && supports(eq, *policy.cross_check);
    const SchemeId check_scheme = policy.cross_check.value_or(SchemeId::StrangSplitting);
    if (check) r.info.cross_check_scheme = std::string(to_string(check_scheme));

    if (path) {
        if (auto hit = read_cache_entry(*path, eq.grid)) {
            r.field = std::move(hit->field);
            r.info.cache_hit = true;
            if (!std::isnan(hit->cross_check_diff)) r.info.cross_check_diff = hit->cross_check_diff;
        }
    }
    if (!r.info.cache_hit) {
        r.field = evolve(eq, SchemeId::Duhamel2, u0, tau_ref, t_end).final;
        if (check) {
            const SpectralField other = evolve(eq, check_scheme, u0, tau_ref, t_end).final;
            const double scale = l2_norm(r.field);
            const double diff = l2_norm(r.field - other) / (scale > 0.0 ? scale : 1.0);
            r.info.cross_check_diff = diff;
            if (!(diff <= policy.tolerance))
                throw Error(ErrorCode::ReferenceDisagreement,
                            fmt::format("duhamel2 and {} references differ by {:.3e} (tolerance {:.1e}) on {}",
                                        to_string(check_scheme), diff, policy.tolerance, eq.name));
        }
        if (path)
            write_cache_entry(*path, {r.field, tau_ref,
                                      r.info.cross_check_diff.value_or(std::numeric_limits<double>::quiet_NaN())});
    }
    r.info.checksum = checksum(r.field);
    r.info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace duhamel::harness
