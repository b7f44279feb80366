#include "cww/kernel.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>

#include "cww/crc32.hpp"
#include "cww/walsh.hpp"

namespace cww {

std::vector<double> cell_masses(const ScalingSamples& s, long long x0, int q) {
    int R = s.resolution;
    if (R < q) throw CwwError("kernel quadrature requires R >= q");
    std::size_t cells = std::size_t(1) << q;
    long long per_cell = 1ll << (R - q);
    double h = std::ldexp(1.0, -R);
    std::vector<double> out(cells, 0.0);
    long long base = x0 << R;  // grid index of x0
    for (std::size_t c = 0; c < cells; ++c) {
        long long start = base + static_cast<long long>(c) * per_cell;
        double acc = 0.5 * (s.at(start) + s.at(start + per_cell));
        for (long long i = 1; i < per_cell; ++i) acc += s.at(start + i);
        out[c] = acc * h;
    }
    return out;
}

KernelTable compute_kernel_table(const FilterSet& f, Boundary boundary, int q, int R) {
    if (q < 1) throw CwwError("kernel table requires q >= 1");
    if (f.nu < 2) throw CwwError("kernel tables are for nu >= 2 (Haar uses the FWHT/DWT composition)");
    KernelTable t;
    t.family = f.family;
    t.nu = f.nu;
    t.boundary = boundary;
    t.q = q;
    t.R = R;
    int nu = f.nu;
    std::size_t S = t.S();
    std::size_t W = static_cast<std::size_t>(2 * nu - 1);

    ScalingSamples interior = cascade(f, ScalingKind::Interior, 0, R);
    t.interior.assign(W * S, 0.0);
    for (int l = -nu + 1; l <= nu - 1; ++l) {
        auto masses = cell_masses(interior, l, q);
        fwht_sequency(masses);
        std::copy(masses.begin(), masses.end(),
                  t.interior.begin() + static_cast<std::size_t>(l + nu - 1) * S);
    }

    if (boundary == Boundary::Vmp) {
        t.left.assign(static_cast<std::size_t>(nu) * W * S, 0.0);
        t.right.assign(static_cast<std::size_t>(nu) * W * S, 0.0);
        for (int m = 0; m < nu; ++m) {
            ScalingSamples lft = cascade(f, ScalingKind::Left, m, R);
            for (int l = 0; l <= nu - 1 + m; ++l) {
                auto masses = cell_masses(lft, l, q);
                fwht_sequency(masses);
                std::copy(masses.begin(), masses.end(),
                          t.left.begin() +
                              (static_cast<std::size_t>(m) * W + static_cast<std::size_t>(l)) * S);
            }
            ScalingSamples rgt = cascade(f, ScalingKind::Right, m, R);
            for (int tt = 0; tt <= nu + m - 1; ++tt) {
                long long lp = tt - (nu + m);  // l' in [-nu-m, -1]
                auto masses = cell_masses(rgt, lp, q);
                fwht_sequency(masses);
                std::copy(masses.begin(), masses.end(),
                          t.right.begin() +
                              (static_cast<std::size_t>(m) * W + static_cast<std::size_t>(tt)) * S);
            }
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Cache file: "CWWK" | version | family | nu | boundary | q | R |
//             3 x (rows, cols? -> count + payload) | crc32
// ---------------------------------------------------------------------------

namespace {
constexpr std::uint32_t kKernelVersion = 1;

void put_u32(std::string& b, std::uint32_t v) { b.append(reinterpret_cast<const char*>(&v), 4); }
void put_arr(std::string& b, const std::vector<double>& a) {
    put_u32(b, static_cast<std::uint32_t>(a.size()));
    b.append(reinterpret_cast<const char*>(a.data()), a.size() * 8);
}
}  // namespace

void save_kernel_table(const KernelTable& t, const std::string& path) {
    std::string body;
    body.append("CWWK", 4);
    put_u32(body, kKernelVersion);
    put_u32(body, t.family == Family::Daubechies ? 0u : 1u);
    put_u32(body, static_cast<std::uint32_t>(t.nu));
    put_u32(body, t.boundary == Boundary::Periodic ? 0u : 1u);
    put_u32(body, static_cast<std::uint32_t>(t.q));
    put_u32(body, static_cast<std::uint32_t>(t.R));
    put_arr(body, t.interior);
    put_arr(body, t.left);
    put_arr(body, t.right);
    std::uint32_t crc = crc32(body.data(), body.size());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CwwError("cannot write kernel cache: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.write(reinterpret_cast<const char*>(&crc), 4);
    if (!out) throw CwwError("short write to kernel cache: " + path);
}

KernelTable load_kernel_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CwwError("cannot open kernel cache: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    if (bytes.size() < 32) throw CwwError("truncated kernel cache: " + path);
    std::uint32_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
    if (crc32(bytes.data(), bytes.size() - 4) != stored)
        throw CwwError("checksum failure in kernel cache: " + path);
    if (std::memcmp(bytes.data(), "CWWK", 4) != 0)
        throw CwwError("bad magic in kernel cache: " + path);

    std::size_t pos = 4;
    auto u32 = [&]() {
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + pos, 4);
        pos += 4;
        return v;
    };
    std::uint32_t version = u32();
    if (version != kKernelVersion) throw CwwError("kernel cache version mismatch: " + path);
    KernelTable t;
    t.family = u32() == 0 ? Family::Daubechies : Family::Symlet;
    t.nu = static_cast<int>(u32());
    t.boundary = u32() == 0 ? Boundary::Periodic : Boundary::Vmp;
    t.q = static_cast<int>(u32());
    t.R = static_cast<int>(u32());
    auto arr = [&]() {
        std::uint32_t n = u32();
        if (pos + std::size_t(n) * 8 > bytes.size() - 4)
            throw CwwError("truncated kernel cache payload: " + path);
        std::vector<double> a(n);
        std::memcpy(a.data(), bytes.data() + pos, std::size_t(n) * 8);
        pos += std::size_t(n) * 8;
        return a;
    };
    t.interior = arr();
    t.left = arr();
    t.right = arr();

    std::size_t W = static_cast<std::size_t>(2 * t.nu - 1);
    if (t.interior.size() != W * t.S())
        throw CwwError("kernel cache shape mismatch (interior): " + path);
    std::size_t edge = t.boundary == Boundary::Vmp ? static_cast<std::size_t>(t.nu) * W * t.S() : 0;
    if (t.left.size() != edge || t.right.size() != edge)
        throw CwwError("kernel cache shape mismatch (edge): " + path);
    return t;
}

std::string kernel_cache_filename(const WaveletSpec& spec, int q, int R) {
    return "cwwk_" + spec.name() + "_" + spec.boundary_name() + "_q" + std::to_string(q) +
           "_R" + std::to_string(R) + "_v" + std::to_string(kKernelVersion) + ".bin";
}

std::string resolve_cache_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("CWW_CACHE_DIR"); env && *env) return env;
    return "";
}

KernelTable get_kernel_table(const FilterSet& f, const WaveletSpec& spec, int q, int R,
                             const std::string& cache_dir) {
    std::string path;
    if (!cache_dir.empty()) {
        path = cache_dir + "/" + kernel_cache_filename(spec, q, R);
        try {
            KernelTable t = load_kernel_table(path);
            if (t.family == spec.family && t.nu == spec.nu && t.boundary == spec.boundary &&
                t.q == q && t.R == R)
                return t;
            std::cerr << "cww: stale kernel cache " << path << ", recomputing\n";
        } catch (const CwwError&) {
            // missing or corrupt: recompute below
        }
    }
    KernelTable t = compute_kernel_table(f, spec.boundary, q, R);
    if (!path.empty()) {
        try {
            save_kernel_table(t, path);
        } catch (const CwwError& e) {
            std::cerr << "cww: " << e.what() << " (continuing without cache)\n";
        }
    }
    return t;
}

}  // namespace cww
