#include "appt/synth.hpp"

#include "appt/errors.hpp"
#include "appt/ops.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

namespace appt {
namespace {

constexpr std::array kVars{"count", "index", "total", "size", "value", "offset", "limit", "result", "width", "depth"};
constexpr std::array kObjects{"buffer", "cache", "queue", "node", "logger"};
constexpr std::array kCalls{"add", "remove", "update", "check", "reset", "flush"};
constexpr std::array kMethods{"computeTotal", "resolveIndex", "updateCache", "parseValue", "scaleWidth",
                              "checkLimit",   "mergeNodes",   "findOffset",  "adjustDepth", "collectResult"};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    int number() { return static_cast<int>(std::uniform_int_distribution<int>(1, 99)(rng_)); }
    template <std::size_t N>
    std::string from(const std::array<const char*, N>& pool) { return pool[pick(N)]; }
    Rng& rng() { return rng_; }

    std::string statement() {
        const std::string v = from(kVars), w = from(kVars), n = std::to_string(number());
        switch (pick(7)) {
            case 0: return "int " + v + " = " + n + ";";
            case 1: return v + " = " + w + " + " + n + ";";
            case 2: return v + " = " + w + " * " + n + ";";
            case 3: return "if (" + v + " > " + n + ") " + v + " = " + w + ";";
            case 4: return from(kObjects) + "." + from(kCalls) + "(" + v + ");";
            case 5: return v + " += " + w + " - " + n + ";";
            default: return "while (" + v + " < " + n + ") " + v + "++;";
        }
    }

private:
    Rng rng_;
};

// Rewrite one literal or operator of `stmt`; returns false when it has neither.
bool mutate(Gen& gen, std::string& stmt) {
    struct Swap {
        const char* from;
        const char* to;
    };
    static constexpr std::array<Swap, 6> kSwaps{
        {{" > ", " >= "}, {" < ", " <= "}, {" + ", " - "}, {" - ", " + "}, {" * ", " / "}, {" += ", " -= "}}};
    std::vector<std::size_t> ops;
    for (std::size_t i = 0; i < kSwaps.size(); ++i) {
        if (stmt.find(kSwaps[i].from) != std::string::npos) ops.push_back(i);
    }
    std::vector<std::size_t> digits;
    for (std::size_t i = 0; i < stmt.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(stmt[i])) &&
            (i == 0 || !std::isdigit(static_cast<unsigned char>(stmt[i - 1])))) {
            digits.push_back(i);
        }
    }
    if (ops.empty() && digits.empty()) return false;
    const bool use_op = !ops.empty() && (digits.empty() || gen.pick(2) == 0);
    if (use_op) {
        const auto& s = kSwaps[ops[gen.pick(ops.size())]];
        stmt.replace(stmt.find(s.from), std::string(s.from).size(), s.to);
    } else {
        const std::size_t at = digits[gen.pick(digits.size())];
        std::size_t end = at;
        while (end < stmt.size() && std::isdigit(static_cast<unsigned char>(stmt[end]))) ++end;
        const int old = std::stoi(stmt.substr(at, end - at));
        stmt.replace(at, end - at, std::to_string(old + 1 + static_cast<int>(gen.pick(3))));
    }
    return true;
}

std::string hunk(const std::vector<std::string>& file, std::size_t change, std::size_t removed,
                 const std::vector<std::string>& added) {
    const std::size_t lo = change >= 3 ? change - 3 : 0;
    const std::size_t hi = std::min(file.size(), change + removed + 3);
    const std::size_t old_count = hi - lo;
    const std::size_t new_count = old_count - removed + added.size();
    std::string out = "--- a/src/main/java/App.java\n+++ b/src/main/java/App.java\n";
    out += "@@ -" + std::to_string(lo + 1) + "," + std::to_string(old_count) + " +" + std::to_string(lo + 1) + "," +
           std::to_string(new_count) + " @@\n";
    for (std::size_t i = lo; i < hi; ++i) {
        if (i == change) {
            for (std::size_t r = 0; r < removed; ++r) out += "-" + file[change + r] + "\n";
            for (const auto& a : added) out += "+" + a + "\n";
            i += removed - 1;
            continue;
        }
        out += " " + file[i] + "\n";
    }
    return out;
}

std::vector<std::string> method_body(Gen& gen) {
    std::vector<std::string> file;
    const std::string name = gen.from(kMethods);
    file.push_back("    public int " + name + "(int " + gen.from(kVars) + ", int " + gen.from(kVars) + ") {");
    const std::size_t statements = 4 + gen.pick(4);
    for (std::size_t i = 0; i < statements; ++i) file.push_back("        " + gen.statement());
    file.push_back("        return " + gen.from(kVars) + ";");
    file.push_back("    }");
    return file;
}

RawPatch deletion_patch(Gen& gen) {
    const auto file = method_body(gen);
    const std::size_t body = file.size() - 3;  // statements between signature and return
    const std::size_t removed = 1 + gen.pick(2);
    const std::size_t change = 1 + gen.pick(body - removed + 1);
    return {"", hunk(file, change, removed, {}), Label::overfitting};
}

RawPatch modification_patch(Gen& gen) {
    while (true) {
        const auto file = method_body(gen);
        const std::size_t body = file.size() - 3;
        const std::size_t change = 1 + gen.pick(body);
        std::string edited = file[change];
        if (!mutate(gen, edited)) continue;
        return {"", hunk(file, change, 1, {edited}), Label::correct};
    }
}

}  // namespace

std::vector<RawPatch> synthesize_dataset(std::size_t per_class, std::uint64_t seed) {
    if (per_class == 0) throw ConfigError("synthetic corpus needs at least one patch per class");
    Gen gen(seed);
    std::vector<RawPatch> patches;
    patches.reserve(2 * per_class);
    for (std::size_t i = 0; i < per_class; ++i) {
        patches.push_back(deletion_patch(gen));
        patches.push_back(modification_patch(gen));
    }
    std::shuffle(patches.begin(), patches.end(), gen.rng());
    for (std::size_t i = 0; i < patches.size(); ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "synth-%04zu", i);
        patches[i].id = id;
    }
    return patches;
}

}  // namespace appt
