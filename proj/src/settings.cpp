#include "cardionn/settings.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace cardionn {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("bad value for " + std::string(key) + ": '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw std::invalid_argument("bad value for " + std::string(key) + ": '" + std::string(text) + "'");
}

struct Entry {
    const char* key;
    std::function<std::string(const Topology&, const TrainConfig&)> get;
    std::function<void(Topology&, TrainConfig&, std::string_view)> set;
};

#define DOUBLE_ENTRY(name)                                                                                   \
    Entry {                                                                                                  \
        #name, [](const Topology&, const TrainConfig& c) { return format_number(c.name); },                  \
            [](Topology&, TrainConfig& c, std::string_view v) { c.name = parse_value<double>(#name, v); }    \
    }
#define COUNT_ENTRY(name)                                                                                    \
    Entry {                                                                                                  \
        #name, [](const Topology&, const TrainConfig& c) { return std::to_string(c.name); },                 \
            [](Topology&, TrainConfig& c, std::string_view v) { c.name = parse_value<std::size_t>(#name, v); } \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table{
        {"layers", [](const Topology& t, const TrainConfig&) { return format_layers(t); },
         [](Topology& t, TrainConfig&, std::string_view v) { t = parse_layers(v, t.hidden, t.output); }},
        {"hidden_activation", [](const Topology& t, const TrainConfig&) { return std::string(to_string(t.hidden)); },
         [](Topology& t, TrainConfig&, std::string_view v) {
             const auto a = parse_activation(v);
             if (!a) throw std::invalid_argument("unknown activation '" + std::string(v) + "'");
             t.hidden = *a;
         }},
        {"output_activation", [](const Topology& t, const TrainConfig&) { return std::string(to_string(t.output)); },
         [](Topology& t, TrainConfig&, std::string_view v) {
             const auto a = parse_activation(v);
             if (!a) throw std::invalid_argument("unknown activation '" + std::string(v) + "'");
             t.output = *a;
         }},
        {"init", [](const Topology&, const TrainConfig& c) { return std::string(to_string(c.init)); },
         [](Topology&, TrainConfig& c, std::string_view v) {
             const auto s = parse_init_scheme(v);
             if (!s) throw std::invalid_argument("unknown init scheme '" + std::string(v) + "'");
             c.init = *s;
         }},
        {"seed", [](const Topology&, const TrainConfig& c) { return std::to_string(c.seed); },
         [](Topology&, TrainConfig& c, std::string_view v) { c.seed = parse_value<std::uint64_t>("seed", v); }},
        COUNT_ENTRY(max_epochs),
        DOUBLE_ENTRY(goal_mse),
        DOUBLE_ENTRY(min_grad_norm),
        DOUBLE_ENTRY(lr0),
        DOUBLE_ENTRY(momentum),
        DOUBLE_ENTRY(lr_inc),
        DOUBLE_ENTRY(lr_dec),
        DOUBLE_ENTRY(max_perf_inc),
        DOUBLE_ENTRY(rp_delta0),
        DOUBLE_ENTRY(rp_delta_min),
        DOUBLE_ENTRY(rp_delta_max),
        DOUBLE_ENTRY(rp_eta_plus),
        DOUBLE_ENTRY(rp_eta_minus),
        DOUBLE_ENTRY(lm_mu0),
        DOUBLE_ENTRY(lm_mu_inc),
        DOUBLE_ENTRY(lm_mu_dec),
        DOUBLE_ENTRY(lm_mu_max),
        COUNT_ENTRY(lm_max_escalations),
        DOUBLE_ENTRY(scg_sigma),
        DOUBLE_ENTRY(scg_lambda0),
        {"pr_clamp", [](const Topology&, const TrainConfig& c) { return std::string(c.pr_clamp ? "true" : "false"); },
         [](Topology&, TrainConfig& c, std::string_view v) { c.pr_clamp = parse_bool("pr_clamp", v); }},
        {"exact_line_search",
         [](const Topology&, const TrainConfig& c) { return std::string(c.exact_line_search ? "true" : "false"); },
         [](Topology&, TrainConfig& c, std::string_view v) {
             c.exact_line_search = parse_bool("exact_line_search", v);
         }},
    };
    return table;
}

#undef DOUBLE_ENTRY
#undef COUNT_ENTRY

} // namespace

Settings describe(const Topology& t, const TrainConfig& c) {
    Settings out;
    for (const auto& e : entries()) out.emplace_back(e.key, e.get(t, c));
    return out;
}

bool apply_setting(Topology& t, TrainConfig& c, std::string_view key, std::string_view value) {
    for (const auto& e : entries()) {
        if (key == e.key) {
            e.set(t, c, value);
            return true;
        }
    }
    return false;
}

} // namespace cardionn
