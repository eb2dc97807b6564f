#include "cloudlap/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cloudlap/rng.hpp"
#include "cloudlap/simd.hpp"
#include "cloudlap/threads.hpp"

namespace cloudlap {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void JsonBuilder::separate() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!has_item_.empty()) {
        if (has_item_.back()) out_ += ',';
        has_item_.back() = true;
    }
}

void JsonBuilder::text(const std::string& s) {
    out_ += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\n': out_ += "\\n"; break;
            case '\t': out_ += "\\t"; break;
            case '\r': out_ += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof esc, "\\u%04x", ch);
                    out_ += esc;
                } else {
                    out_ += ch;
                }
        }
    }
    out_ += '"';
}

JsonBuilder& JsonBuilder::begin_object() {
    separate();
    out_ += '{';
    has_item_.push_back(false);
    return *this;
}
JsonBuilder& JsonBuilder::end_object() {
    out_ += '}';
    has_item_.pop_back();
    return *this;
}
JsonBuilder& JsonBuilder::begin_array() {
    separate();
    out_ += '[';
    has_item_.push_back(false);
    return *this;
}
JsonBuilder& JsonBuilder::end_array() {
    out_ += ']';
    has_item_.pop_back();
    return *this;
}
JsonBuilder& JsonBuilder::key(const std::string& k) {
    separate();
    text(k);
    out_ += ':';
    pending_key_ = true;
    return *this;
}
JsonBuilder& JsonBuilder::value(double v) {
    separate();
    if (std::isfinite(v)) {
        out_ += g17(v);
    } else {
        // JSON has no literals for these; stringify to keep files parseable.
        text(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
    }
    return *this;
}
JsonBuilder& JsonBuilder::value(int v) { return value(static_cast<std::int64_t>(v)); }
JsonBuilder& JsonBuilder::value(std::int64_t v) {
    separate();
    out_ += std::to_string(v);
    return *this;
}
JsonBuilder& JsonBuilder::value(std::uint64_t v) {
    separate();
    out_ += std::to_string(v);
    return *this;
}
JsonBuilder& JsonBuilder::value(bool v) {
    separate();
    out_ += v ? "true" : "false";
    return *this;
}
JsonBuilder& JsonBuilder::value(const char* v) {
    separate();
    text(v);
    return *this;
}
JsonBuilder& JsonBuilder::value(const std::string& v) {
    separate();
    text(v);
    return *this;
}
JsonBuilder& JsonBuilder::field(const std::string& k, double v) { return key(k).value(v); }
JsonBuilder& JsonBuilder::field(const std::string& k, int v) { return key(k).value(v); }
JsonBuilder& JsonBuilder::field(const std::string& k, std::int64_t v) { return key(k).value(v); }
JsonBuilder& JsonBuilder::field(const std::string& k, std::uint64_t v) { return key(k).value(v); }
JsonBuilder& JsonBuilder::field(const std::string& k, bool v) { return key(k).value(v); }
JsonBuilder& JsonBuilder::field(const std::string& k, const char* v) { return key(k).value(v); }
JsonBuilder& JsonBuilder::field(const std::string& k, const std::string& v) { return key(k).value(v); }

void write_text_file(const std::string& path, const std::string& text) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        throw std::runtime_error("cannot write " + path);
    }
    if (!text.empty() &&
        std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
        std::fclose(f);
        throw std::runtime_error("short write to " + path);
    }
    std::fclose(f);
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

void write_manifest(const std::string& path,
                    const std::string& canonical_config) {
    JsonBuilder j;
    j.begin_object()
        .field("config_hash", hex64(fnv1a64(canonical_config)))
        .field("config", canonical_config)
        .field("version", kLibraryVersion)
        .field("simd", simd::active_name())
        .field("threads", thread_count())
        .end_object();
    write_text_file(path, j.str() + "\n");
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return (v.size() % 2 == 1) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double loglog_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need two matched points");
    }
    const int n = static_cast<int>(x.size());
    double mx = 0.0;
    double my = 0.0;
    std::vector<double> lx(n);
    std::vector<double> ly(n);
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: nonpositive sample");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("loglog_slope: x collinear");
    return num / den;
}

SlopeFit loglog_slope_bootstrap(const std::vector<double>& x,
                                const std::vector<std::vector<double>>& ys,
                                std::uint64_t seed, int reps) {
    if (x.size() != ys.size()) {
        throw std::invalid_argument("loglog_slope_bootstrap: size mismatch");
    }
    std::vector<double> med(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) med[i] = median(ys[i]);

    SlopeFit fit;
    fit.slope = loglog_slope(x, med);

    Rng rng(seed, 0xB007);
    std::vector<double> slopes;
    slopes.reserve(reps);
    std::vector<double> re(x.size());
    for (int rep = 0; rep < reps; ++rep) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto& cell = ys[i];
            std::vector<double> pick(cell.size());
            for (std::size_t t = 0; t < cell.size(); ++t) {
                pick[t] = cell[rng.below(cell.size())];
            }
            re[i] = median(std::move(pick));
        }
        slopes.push_back(loglog_slope(x, re));
    }
    std::sort(slopes.begin(), slopes.end());
    const int lo_idx = static_cast<int>(0.025 * (reps - 1));
    const int hi_idx = static_cast<int>(0.975 * (reps - 1));
    fit.lo = slopes[lo_idx];
    fit.hi = slopes[hi_idx];
    return fit;
}

} // namespace cloudlap
