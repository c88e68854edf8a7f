#include "cardionn/data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <ostream>

#include "cardionn/random.hpp"

namespace cardionn {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

} // namespace

bool RawRecord::has_missing() const {
    return std::any_of(attributes.begin(), attributes.end(), [](const auto& a) { return !a.has_value(); });
}

std::vector<RawRecord> parse_heart_csv(std::string_view text) {
    std::vector<RawRecord> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const std::string_view line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != kAttributeCount + 1) {
            throw MalformedRow(line_no, "expected " + std::to_string(kAttributeCount + 1) + " fields, found " +
                                            std::to_string(fields.size()));
        }

        RawRecord rec;
        rec.line = line_no;
        for (std::size_t i = 0; i < kAttributeCount; ++i) {
            if (fields[i] == "?") continue;
            const auto v = parse_number(fields[i]);
            if (!v) throw MalformedRow(line_no, "attribute " + std::to_string(i + 1) + " is not numeric: '" +
                                                    std::string(fields[i]) + "'");
            rec.attributes[i] = *v;
        }
        const auto stage = parse_number(fields[kAttributeCount]);
        if (!stage || *stage != std::floor(*stage) || *stage < -1.0 || *stage > 4.0) {
            throw MalformedRow(line_no, "disease stage must be an integer 0-4, got '" +
                                            std::string(fields[kAttributeCount]) + "'");
        }
        rec.stage = static_cast<int>(*stage);
        out.push_back(rec);
    }
    return out;
}

std::vector<RawRecord> clean(std::vector<RawRecord> records, MissingPolicy policy) {
    if (policy == MissingPolicy::drop_missing) {
        std::erase_if(records, [](const RawRecord& r) { return r.has_missing(); });
    }
    if (records.empty()) throw EmptyAfterCleaning();
    return records;
}

double FeatureRange::normalize(double f) const {
    if (!(max > min)) return 0.0;
    if (min == -1.0 && max == 1.0) return f;
    return 2.0 * (f - min) / (max - min) - 1.0;
}

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(
        std::count_if(samples.targets.begin(), samples.targets.end(), [](double t) { return t > 0.0; }));
}

std::vector<std::size_t> Dataset::positive_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.targets.size(); ++i)
        if (samples.targets[i] > 0.0) idx.push_back(i);
    return idx;
}

std::uint64_t Dataset::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    for (double v : samples.features.data()) mix(v);
    for (double v : samples.targets) mix(v);
    return h;
}

Dataset binarize_and_normalize(std::span<const RawRecord> records) {
    if (records.empty()) throw EmptyAfterCleaning();
    Dataset d;
    d.ranges.resize(kAttributeCount);
    for (std::size_t j = 0; j < kAttributeCount; ++j) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& r : records) {
            if (!r.attributes[j]) throw std::invalid_argument("binarize_and_normalize: record has missing values");
            lo = std::min(lo, *r.attributes[j]);
            hi = std::max(hi, *r.attributes[j]);
        }
        d.ranges[j] = {lo, hi};
    }
    d.samples.features = Matrix(records.size(), kAttributeCount);
    d.samples.targets.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t j = 0; j < kAttributeCount; ++j) {
            d.samples.features(i, j) = d.ranges[j].normalize(*records[i].attributes[j]);
        }
        d.samples.targets[i] = records[i].stage > 0 ? 1.0 : -1.0;
    }
    return d;
}

void write_snapshot(const Dataset& d, std::ostream& out) {
    char buf[32];
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.samples.features.cols(); ++j) {
            const auto res = std::to_chars(buf, buf + sizeof buf, d.samples.features(i, j));
            out.write(buf, res.ptr - buf);
            out << ',';
        }
        out << (d.samples.targets[i] > 0.0 ? "1" : "-1") << '\n';
    }
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> idx;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f == fold) continue;
        idx.insert(idx.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

FoldPlan kfold_split(std::size_t n, std::size_t k, std::span<const std::size_t> positives, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: need k >= 2");
    if (n < k) throw TooFewSamples(n, k);

    std::vector<char> is_pos(n, 0);
    for (std::size_t i : positives) {
        if (i >= n) throw std::out_of_range("kfold_split: positive index out of range");
        is_pos[i] = 1;
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (is_pos[i] ? pos : neg).push_back(i);

    Rng rng(seed);
    rng.shuffle(std::span(pos));
    rng.shuffle(std::span(neg));

    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(k);
    std::size_t next = 0;
    for (std::size_t i : pos) plan.folds[next++ % k].push_back(i);
    for (std::size_t i : neg) plan.folds[next++ % k].push_back(i);
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

Samples encode_targets(const Samples& s, Activation output) {
    if (output == Activation::tanh) return s;
    Samples out = s;
    for (double& t : out.targets) t = t > 0.0 ? 1.0 : 0.0;
    return out;
}

} // namespace cardionn
