#include "subloc/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "subloc/error.hpp"

namespace subloc {

static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

namespace {

constexpr std::array<char, 8> kRfmMagic{'S', 'U', 'B', 'L', 'O', 'C', 'R', 'F'};
constexpr std::array<char, 8> kCacheMagic{'S', 'U', 'B', 'L', 'O', 'C', 'C', 'A'};
constexpr std::uint32_t kRfmVersion = 1;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    }
    if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what + " '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_key(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line, "bad key '" + std::string(s) + "'");
    }
    return v;
}

Point2 parse_point(std::string_view token, std::size_t line) {
    const auto comma = token.find(',');
    if (comma == std::string_view::npos) throw ParseError(line, "position must be 'x,y'");
    return {parse_double(trim(token.substr(0, comma)), line, "coordinate"),
            parse_double(trim(token.substr(comma + 1)), line, "coordinate")};
}

ReferenceRecord parse_record(std::string_view text, std::size_t line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
        std::size_t end = pos;
        while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
        if (end > pos) tokens.push_back(text.substr(pos, end - pos));
        pos = end;
    }
    ReferenceRecord rec;
    rec.position = parse_point(tokens.front(), line);
    std::vector<std::pair<FeatureKey, double>> pairs;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto colon = tokens[i].find(':');
        if (colon == std::string_view::npos) throw ParseError(line, "expected key:value, got '" + std::string(tokens[i]) + "'");
        pairs.emplace_back(FeatureKey{parse_key(tokens[i].substr(0, colon), line)},
                           parse_double(tokens[i].substr(colon + 1), line, "value"));
    }
    try {
        rec.fingerprint = Fingerprint::from_pairs(std::move(pairs));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(line, e.what());
    }
    return rec;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

template <typename Fn>
auto with_input(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return fn(in);
}

template <typename Fn>
void with_output(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw Error("write failed for " + path.string());
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void point(Point2 p) { f64(p.x); f64(p.y); }
    void rect(const Rect& r) { point(r.min); point(r.max); }
    void keys(const KeySet& k) {
        u64(k.size());
        for (auto key : k) u64(key.id);
    }
    void fingerprint(const Fingerprint& fp) {
        keys(fp.keys());
        for (double v : fp.values()) f64(v);
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw Error("truncated container");
    }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
    std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    Point2 point() { const double x = f64(); return {x, f64()}; }
    Rect rect() { const Point2 a = point(); return {a, point()}; }
    std::size_t count() {
        const std::uint64_t n = u64();
        if (n > (std::uint64_t{1} << 40)) throw Error("corrupt container (implausible length)");
        return static_cast<std::size_t>(n);
    }
    KeySet keys() {
        KeySet k(count());
        for (auto& key : k) key.id = u64();
        return k;
    }
    Fingerprint fingerprint() {
        auto k = keys();
        std::vector<double> v(k.size());
        for (auto& x : v) x = f64();
        return Fingerprint(std::move(k), std::move(v));
    }
    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes after container");
    }

private:
    std::istream& in_;
};

void check_magic(Reader& r, const std::array<char, 8>& magic, const char* what) {
    std::array<char, 8> got{};
    r.bytes(got.data(), got.size());
    if (got != magic) throw Error(std::string("not a ") + what + " file");
}

}  // namespace

std::vector<ReferenceRecord> read_fingerprint_log(std::istream& in) {
    std::vector<ReferenceRecord> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        out.push_back(parse_record(text, number));
    }
    return out;
}

std::vector<ReferenceRecord> read_fingerprint_log(const std::filesystem::path& path) {
    return with_input(path, [](std::istream& in) { return read_fingerprint_log(in); });
}

void write_fingerprint_log(std::ostream& out, const std::vector<ReferenceRecord>& records) {
    for (const auto& r : records) {
        out << format_double(r.position.x) << ',' << format_double(r.position.y);
        const auto& keys = r.fingerprint.keys();
        const auto& values = r.fingerprint.values();
        for (std::size_t i = 0; i < keys.size(); ++i) out << ' ' << keys[i].id << ':' << format_double(values[i]);
        out << '\n';
    }
}

void write_fingerprint_log(const std::filesystem::path& path, const std::vector<ReferenceRecord>& records) {
    with_output(path, [&](std::ostream& out) { write_fingerprint_log(out, records); });
}

RawRFM ingest(std::istream& in) {
    RawRFM raw;
    raw.records = read_fingerprint_log(in);
    if (raw.records.empty()) throw Error("no reference data");
    raw.roi_bounds = bounding_box(raw.records);
    return raw;
}

RawRFM ingest(const std::filesystem::path& path) {
    return with_input(path, [](std::istream& in) { return ingest(in); });
}

Polygon read_polygon(const std::filesystem::path& path) {
    return with_input(path, [](std::istream& in) {
        std::vector<Point2> vertices;
        std::string line;
        std::size_t number = 0;
        while (std::getline(in, line)) {
            ++number;
            const auto text = trim(line);
            if (text.empty() || text.front() == '#') continue;
            vertices.push_back(parse_point(text, number));
        }
        return Polygon(std::move(vertices));
    });
}

void write_rfm(std::ostream& out, const GriddedRFM& rfm) {
    Writer w(out);
    w.bytes(kRfmMagic.data(), kRfmMagic.size());
    w.u32(kRfmVersion);
    w.f64(rfm.cell_size);
    w.f64(rfm.grid_spacing);
    w.keys(rfm.roi_key_union);
    w.u64(rfm.sub_regions.size());
    for (const auto& region : rfm.sub_regions) {
        w.u64(region.index);
        w.rect(region.bounds);
        w.keys(region.key_union);
        w.u64(region.reference_points.size());
        for (const auto& p : region.reference_points) {
            w.point(p.position);
            w.fingerprint(p.fingerprint);
        }
    }
}

GriddedRFM read_rfm(std::istream& in) {
    Reader r(in);
    check_magic(r, kRfmMagic, "gridded RFM");
    if (const auto v = r.u32(); v != kRfmVersion) {
        throw Error("RFM format version " + std::to_string(v) + " is not supported (expected " +
                    std::to_string(kRfmVersion) + ")");
    }
    GriddedRFM rfm;
    rfm.cell_size = r.f64();
    rfm.grid_spacing = r.f64();
    rfm.roi_key_union = r.keys();
    rfm.sub_regions.resize(r.count());
    for (auto& region : rfm.sub_regions) {
        region.index = r.u64();
        region.bounds = r.rect();
        region.key_union = r.keys();
        region.reference_points.resize(r.count());
        for (auto& p : region.reference_points) {
            p.position = r.point();
            p.fingerprint = r.fingerprint();
        }
    }
    r.expect_end();
    return rfm;
}

void write_rfm(const std::filesystem::path& path, const GriddedRFM& rfm) {
    with_output(path, [&](std::ostream& out) { write_rfm(out, rfm); });
}

GriddedRFM read_rfm(const std::filesystem::path& path) {
    return with_input(path, [](std::istream& in) { return read_rfm(in); });
}

void write_cache(std::ostream& out, const PrecomputedCache& cache) {
    Writer w(out);
    w.bytes(kCacheMagic.data(), kCacheMagic.size());
    w.u32(PrecomputedCache::kFormatVersion);
    w.f64(cache.grid.cell_size);
    w.f64(cache.grid.grid_spacing);
    w.f64(cache.missing_value);
    w.f64(cache.pooling_radius);
    w.u8(static_cast<std::uint8_t>(cache.kde.rule));
    w.f64(cache.kde.bandwidth_floor);
    w.u8(cache.full ? 1 : 0);
    w.keys(cache.roi_key_union);
    w.u64(cache.regions.size());
    for (std::size_t i = 0; i < cache.regions.size(); ++i) {
        const auto& rc = cache.regions[i];
        w.u64(rc.index);
        w.rect(rc.bounds);
        w.keys(cache.key_unions[i]);
        w.u64(rc.profile.entries.size());
        for (const auto& e : rc.profile.entries) {
            w.u64(e.key.id);
            w.f64(e.frequency);
        }
        w.u64(rc.candidates.size());
        for (const auto& p : rc.candidates) w.point(p);
        w.keys(rc.model_keys);
        for (const auto& m : rc.models) {
            w.f64(m.bandwidth);
            w.u64(m.centers.size());
            w.bytes(m.centers.data(), m.centers.size() * sizeof(double));
        }
    }
}

PrecomputedCache read_cache(std::istream& in) {
    Reader r(in);
    check_magic(r, kCacheMagic, "precomputed cache");
    if (const auto v = r.u32(); v != PrecomputedCache::kFormatVersion) {
        throw Error("cache format version " + std::to_string(v) + " does not match expected version " +
                    std::to_string(PrecomputedCache::kFormatVersion));
    }
    PrecomputedCache cache;
    cache.grid.cell_size = r.f64();
    cache.grid.grid_spacing = r.f64();
    cache.missing_value = r.f64();
    cache.pooling_radius = r.f64();
    const auto rule = r.u8();
    if (rule != static_cast<std::uint8_t>(BandwidthRule::Scott)) throw Error("unknown bandwidth rule in cache");
    cache.kde.rule = BandwidthRule::Scott;
    cache.kde.bandwidth_floor = r.f64();
    cache.full = r.u8() != 0;
    cache.roi_key_union = r.keys();
    const std::size_t n = r.count();
    cache.regions.resize(n);
    cache.key_unions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& rc = cache.regions[i];
        rc.index = r.u64();
        rc.bounds = r.rect();
        cache.key_unions[i] = r.keys();
        rc.profile.entries.resize(r.count());
        for (auto& e : rc.profile.entries) {
            e.key.id = r.u64();
            e.frequency = r.f64();
        }
        rc.candidates.resize(r.count());
        for (auto& p : rc.candidates) p = r.point();
        rc.model_keys = r.keys();
        rc.models.resize(rc.candidates.size() * rc.model_keys.size());
        for (auto& m : rc.models) {
            m.bandwidth = r.f64();
            m.centers.resize(r.count());
            r.bytes(m.centers.data(), m.centers.size() * sizeof(double));
        }
    }
    r.expect_end();
    cache.validate();
    return cache;
}

void write_cache(const std::filesystem::path& path, const PrecomputedCache& cache) {
    with_output(path, [&](std::ostream& out) { write_cache(out, cache); });
}

PrecomputedCache read_cache(const std::filesystem::path& path) {
    return with_input(path, [](std::istream& in) { return read_cache(in); });
}

}  // namespace subloc
