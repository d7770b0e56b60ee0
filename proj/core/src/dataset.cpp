#include "appt/dataset.hpp"

#include "appt/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace appt {

std::vector<RawPatch> read_dataset(std::istream& in) {
    std::vector<RawPatch> patches;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = "dataset line " + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!obj.is_object()) throw DataError(where + ": expected a JSON object");
        if (!obj.contains("id") || !obj["id"].is_string()) throw DataError(where + ": missing string \"id\"");
        if (!obj.contains("diff") || !obj["diff"].is_string()) {
            throw DataError(where + ": missing string \"diff\"");
        }
        RawPatch p;
        p.id = obj["id"].get<std::string>();
        p.diff_text = obj["diff"].get<std::string>();
        if (obj.contains("label") && !obj["label"].is_null()) {
            const auto& l = obj["label"];
            if (!l.is_string() || !(p.label = parse_label(l.get<std::string>()))) {
                throw DataError(where + ": label must be \"correct\", \"overfitting\" or null");
            }
        }
        if (!ids.insert(p.id).second) throw DataError(where + ": duplicate id " + p.id);
        patches.push_back(std::move(p));
    }
    return patches;
}

std::vector<RawPatch> read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dataset " + path.string());
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const std::vector<RawPatch>& patches) {
    for (const auto& p : patches) {
        nlohmann::ordered_json obj;
        obj["id"] = p.id;
        obj["diff"] = p.diff_text;
        obj["label"] = p.label ? nlohmann::ordered_json(std::string(to_string(*p.label))) : nullptr;
        out << obj.dump() << '\n';
    }
}

void write_dataset(const std::filesystem::path& path, const std::vector<RawPatch>& patches) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset " + path.string());
    write_dataset(out, patches);
}

}  // namespace appt
