#include "qtwist/cache.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "qtwist/errors.hpp"

namespace qtwist {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'C', 'T', 'B', '1'};

void put_i64(std::ofstream& out, i64 v) {
    unsigned char buf[8];
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

i64 get_i64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<i64>(u);
}

}  // namespace

std::string coefficient_cache_name(const WeierstrassCurve& c, i64 n_max) {
    return "ctb1_" + std::to_string(c.a1) + "_" + std::to_string(c.a2) + "_" +
           std::to_string(c.a3) + "_" + std::to_string(c.a4) + "_" +
           std::to_string(c.a6) + "_q" + std::to_string(c.conductor_q) + "_n" +
           std::to_string(n_max) + ".ctb";
}

void save_coefficient_cache(const std::string& dir, const WeierstrassCurve& curve,
                            const CoefficientTable& table) {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path path = fs::path(dir) / coefficient_cache_name(curve, table.n_max);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write coefficient cache: " + tmp.string());
        out.write(kMagic, 4);
        for (i64 v : {curve.a1, curve.a2, curve.a3, curve.a4, curve.a6,
                      curve.conductor_q, table.n_max})
            put_i64(out, v);
        for (i64 n = 1; n <= table.n_max; ++n) put_i64(out, table.a[static_cast<size_t>(n)]);
        if (!out) throw io_error("short write on coefficient cache: " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot finalize coefficient cache: " + path.string());
}

namespace {

std::optional<CoefficientTable> read_cache_file(const fs::path& path,
                                                const WeierstrassCurve& curve) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) return std::nullopt;
    i64 hdr[7];
    for (auto& h : hdr) h = get_i64(in);
    if (!in) return std::nullopt;
    if (hdr[0] != curve.a1 || hdr[1] != curve.a2 || hdr[2] != curve.a3 ||
        hdr[3] != curve.a4 || hdr[4] != curve.a6 || hdr[5] != curve.conductor_q)
        return std::nullopt;
    i64 n_max = hdr[6];
    if (n_max < 1) return std::nullopt;
    CoefficientTable t;
    t.n_max = n_max;
    t.a.assign(static_cast<size_t>(n_max) + 1, 0);
    for (i64 n = 1; n <= n_max; ++n) {
        t.a[static_cast<size_t>(n)] = get_i64(in);
        if (!in) return std::nullopt;
    }
    if (t.a[1] != 1) return std::nullopt;
    t.lambda.assign(static_cast<size_t>(n_max) + 1, 0.0);
    for (i64 n = 1; n <= n_max; ++n)
        t.lambda[static_cast<size_t>(n)] =
            static_cast<double>(t.a[static_cast<size_t>(n)]) / std::sqrt(static_cast<double>(n));
    return t;
}

}  // namespace

std::optional<CoefficientTable> load_coefficient_cache(const std::string& dir,
                                                       const WeierstrassCurve& curve,
                                                       i64 n_max) {
    if (dir.empty()) return std::nullopt;
    fs::path exact = fs::path(dir) / coefficient_cache_name(curve, n_max);
    if (fs::exists(exact)) {
        if (auto t = read_cache_file(exact, curve)) return t;
    }
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return std::nullopt;
    std::optional<CoefficientTable> best;
    for (const auto& ent : fs::directory_iterator(dir, ec)) {
        if (!ent.is_regular_file()) continue;
        if (ent.path().extension() != ".ctb") continue;
        auto t = read_cache_file(ent.path(), curve);
        if (t && t->n_max >= n_max && (!best || t->n_max < best->n_max)) best = std::move(t);
    }
    return best;
}

}  // namespace qtwist
