#include "spearlens/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "spearlens/errors.hpp"

namespace spearlens {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Role role) {
    return role == Role::Adversary ? "adversary" : "target";
}

Role role_from_string(std::string_view s) {
    if (s == "adversary") return Role::Adversary;
    if (s == "target") return Role::Target;
    throw ValidationError("unknown role \"" + std::string(s) +
                          "\" (expected \"adversary\" or \"target\")");
}

const Document* CampaignManifest::find(std::string_view id) const {
    for (const auto& doc : documents) {
        if (doc.id == id) return &doc;
    }
    return nullptr;
}

std::vector<std::size_t> CampaignManifest::indices_of(Role role) const {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (documents[i].role == role) indices.push_back(i);
    }
    return indices;
}

void validate_manifest(const CampaignManifest& manifest) {
    std::unordered_map<std::string_view, const Document*> by_id;
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        const Document& doc = manifest.documents[i];
        if (doc.id.empty()) {
            throw ValidationError("documents[" + std::to_string(i) +
                                  "]: empty id");
        }
        if (!by_id.emplace(doc.id, &doc).second) {
            throw ValidationError("documents[" + std::to_string(i) +
                                  "]: duplicate id \"" + doc.id + "\"");
        }
    }
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (std::size_t i = 0; i < manifest.edges.size(); ++i) {
        const Edge& edge = manifest.edges[i];
        const std::string where = "edges[" + std::to_string(i) + "]";
        auto adv = by_id.find(edge.adversary);
        if (adv == by_id.end()) {
            throw ValidationError(where + ": unknown adversary id \"" +
                                  edge.adversary + "\"");
        }
        if (adv->second->role != Role::Adversary) {
            throw ValidationError(where + ": role mismatch: \"" +
                                  edge.adversary + "\" is not an adversary");
        }
        auto tgt = by_id.find(edge.target);
        if (tgt == by_id.end()) {
            throw ValidationError(where + ": unknown target id \"" +
                                  edge.target + "\"");
        }
        if (tgt->second->role != Role::Target) {
            throw ValidationError(where + ": role mismatch: \"" + edge.target +
                                  "\" is not a target");
        }
        if (edge.count < 1) {
            throw ValidationError(where + ": count must be >= 1");
        }
        if (!seen.emplace(edge.adversary, edge.target).second) {
            throw ValidationError(where + ": duplicate edge " + edge.adversary +
                                  " -> " + edge.target);
        }
    }
}

namespace {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read document file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

const json& require_field(const json& record, const char* key,
                          const std::string& where) {
    auto it = record.find(key);
    if (it == record.end()) {
        throw ValidationError(where + ": missing field \"" + key + "\"");
    }
    return *it;
}

std::string string_field(const json& record, const char* key,
                         const std::string& where) {
    const json& value = require_field(record, key, where);
    if (!value.is_string()) {
        throw ValidationError(where + ": field \"" + key +
                              "\" must be a string");
    }
    return value.get<std::string>();
}

// Turns a document id into a safe relative filename.
std::string sanitize_filename(std::string_view id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

}  // namespace

CampaignManifest load_manifest(const std::filesystem::path& manifest_file,
                               std::vector<std::string>* warnings) {
    std::ifstream in(manifest_file);
    if (!in) {
        throw ValidationError("manifest not found: " + manifest_file.string());
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("manifest " + manifest_file.string() +
                              ": " + e.what());
    }
    if (!root.is_object()) {
        throw ValidationError("manifest root must be a JSON object");
    }

    const std::filesystem::path base = manifest_file.parent_path();
    CampaignManifest manifest;

    const json& documents = require_field(root, "documents", "manifest");
    if (!documents.is_array()) {
        throw ValidationError("manifest: \"documents\" must be an array");
    }
    for (std::size_t i = 0; i < documents.size(); ++i) {
        const std::string where = "documents[" + std::to_string(i) + "]";
        const json& record = documents[i];
        if (!record.is_object()) {
            throw ValidationError(where + ": record must be an object");
        }
        Document doc;
        doc.id = string_field(record, "id", where);
        try {
            doc.role = role_from_string(string_field(record, "role", where));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        const std::string rel = string_field(record, "path", where);
        doc.text = read_text_file(base / rel);
        if (auto it = record.find("metadata"); it != record.end()) {
            if (!it->is_object()) {
                throw ValidationError(where + ": \"metadata\" must be an object");
            }
            for (const auto& [key, value] : it->items()) {
                if (!value.is_string()) {
                    throw ValidationError(where + ": metadata value for \"" +
                                          key + "\" must be a string");
                }
                doc.metadata[key] = value.get<std::string>();
            }
        }
        if (doc.text.empty() && warnings) {
            warnings->push_back("document \"" + doc.id + "\" has empty text");
        }
        manifest.documents.push_back(std::move(doc));
    }

    if (auto it = root.find("edges"); it != root.end()) {
        if (!it->is_array()) {
            throw ValidationError("manifest: \"edges\" must be an array");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "edges[" + std::to_string(i) + "]";
            const json& record = (*it)[i];
            if (!record.is_object()) {
                throw ValidationError(where + ": record must be an object");
            }
            Edge edge;
            edge.adversary = string_field(record, "adversary", where);
            edge.target = string_field(record, "target", where);
            if (auto count = record.find("count"); count != record.end()) {
                if (!count->is_number_unsigned() || count->get<std::uint64_t>() < 1) {
                    throw ValidationError(where +
                                          ": \"count\" must be a positive integer");
                }
                edge.count = count->get<std::uint32_t>();
            }
            manifest.edges.push_back(std::move(edge));
        }
    }

    validate_manifest(manifest);
    return manifest;
}

void save_manifest(const CampaignManifest& manifest,
                   const std::filesystem::path& dir) {
    validate_manifest(manifest);
    std::filesystem::create_directories(dir);

    // Resolve filename collisions after sanitizing.
    std::unordered_set<std::string> used;
    std::vector<std::string> filenames;
    filenames.reserve(manifest.documents.size());
    for (const auto& doc : manifest.documents) {
        std::string stem = sanitize_filename(doc.id);
        std::string candidate = stem + ".txt";
        for (int suffix = 1; !used.insert(candidate).second; ++suffix) {
            candidate = stem + "_" + std::to_string(suffix) + ".txt";
        }
        filenames.push_back(candidate);
    }

    ordered_json root;
    root["documents"] = ordered_json::array();
    for (std::size_t i = 0; i < manifest.documents.size(); ++i) {
        const Document& doc = manifest.documents[i];
        std::ofstream out(dir / filenames[i], std::ios::binary);
        if (!out) {
            throw Error("cannot write " + (dir / filenames[i]).string());
        }
        out << doc.text;

        ordered_json record;
        record["id"] = doc.id;
        record["role"] = std::string(to_string(doc.role));
        record["path"] = filenames[i];
        record["metadata"] = ordered_json::object();
        for (const auto& [key, value] : doc.metadata) {
            record["metadata"][key] = value;
        }
        root["documents"].push_back(std::move(record));
    }
    root["edges"] = ordered_json::array();
    for (const Edge& edge : manifest.edges) {
        root["edges"].push_back(ordered_json{{"adversary", edge.adversary},
                                             {"target", edge.target},
                                             {"count", edge.count}});
    }

    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw Error("cannot write " + (dir / "manifest.json").string());
    }
    out << root.dump(2) << '\n';
}

}  // namespace spearlens
