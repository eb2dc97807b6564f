#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cloudlap {

inline constexpr const char* kLibraryVersion = "0.1.0";

// 17-significant-digit decimal; round-trips every finite double.
std::string g17(double x);

// JSON assembled by explicit structure calls; keys appear in call order,
// numbers through g17, so equal inputs serialize to equal bytes.
class JsonBuilder {
  public:
    JsonBuilder& begin_object();
    JsonBuilder& end_object();
    JsonBuilder& begin_array();
    JsonBuilder& end_array();
    JsonBuilder& key(const std::string& k);
    JsonBuilder& value(double v);
    JsonBuilder& value(int v);
    JsonBuilder& value(std::int64_t v);
    JsonBuilder& value(std::uint64_t v);
    JsonBuilder& value(bool v);
    JsonBuilder& value(const char* v);
    JsonBuilder& value(const std::string& v);
    JsonBuilder& field(const std::string& k, double v);
    JsonBuilder& field(const std::string& k, int v);
    JsonBuilder& field(const std::string& k, std::int64_t v);
    JsonBuilder& field(const std::string& k, std::uint64_t v);
    JsonBuilder& field(const std::string& k, bool v);
    JsonBuilder& field(const std::string& k, const char* v);
    JsonBuilder& field(const std::string& k, const std::string& v);
    const std::string& str() const { return out_; }

  private:
    void separate();
    void text(const std::string& s);
    std::string out_;
    std::vector<bool> has_item_;
    bool pending_key_ = false;
};

// Throws std::runtime_error when the file cannot be created.
void write_text_file(const std::string& path, const std::string& text);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Sidecar written next to every experiment artifact: hash of the canonical
// configuration string, library version, arithmetic backend, thread count.
// Contains nothing clock- or host-dependent, so reruns are byte-identical.
void write_manifest(const std::string& path,
                    const std::string& canonical_config);

double median(std::vector<double> v);

// Least-squares slope of log y against log x. Requires positive entries
// and at least two points.
double loglog_slope(const std::vector<double>& x,
                    const std::vector<double>& y);

// Slope of log median(ys[i]) against log x[i] with a 95% band obtained by
// resampling each replicate set with replacement.
struct SlopeFit {
    double slope = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
SlopeFit loglog_slope_bootstrap(const std::vector<double>& x,
                                const std::vector<std::vector<double>>& ys,
                                std::uint64_t seed, int reps = 1000);

} // namespace cloudlap
