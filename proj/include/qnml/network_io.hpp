#pragma once

// JSON network documents:
//
//   {
//     "variables": [{"name": "A", "arity": 2, "values": ["no", "yes"]}, ...],
//     "parents":   {"B": ["A"], ...},
//     "cpts":      {"A": [[0.3, 0.7]], "B": [[0.9, 0.1], [0.2, 0.8]]}
//   }
//
// "values" and "cpts" are optional; variables missing from "parents" have
// none. CPT rows follow the mixed-radix parent configuration order
// (parents by ascending variable position, last one fastest).

#include <qnml/dag.hpp>
#include <qnml/error.hpp>
#include <qnml/model.hpp>

#include <json.hpp>

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace qnml {

struct NetworkDocument {
    BayesianNetwork net;          ///< cpts empty for structure-only documents
    bool explicit_values = false; ///< "values" given for every variable

    bool has_cpts() const noexcept { return !net.cpts.empty(); }
};

inline NetworkDocument parse_network(std::istream& in, const std::string& source = "<stream>") {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        detail::data_error(source + ": " + e.what());
    }
    NetworkDocument out;
    auto& net = out.net;
    try {
        if (!doc.contains("variables") || !doc["variables"].is_array() || doc["variables"].empty())
            detail::data_error(source + ": 'variables' must be a non-empty list");
        std::map<std::string, std::size_t> index;
        out.explicit_values = true;
        for (const auto& v : doc["variables"]) {
            const auto name = v.at("name").get<std::string>();
            const auto arity = v.at("arity").get<std::size_t>();
            if (arity < 1) detail::data_error(source + ": arity of '" + name + "' must be positive");
            if (!index.emplace(name, net.names.size()).second)
                detail::data_error(source + ": duplicate variable '" + name + "'");
            net.names.push_back(name);
            net.arities.push_back(arity);
            if (v.contains("values")) {
                auto labels = v["values"].get<std::vector<std::string>>();
                if (labels.size() != arity) detail::data_error(source + ": 'values' of '" + name + "' must list arity labels");
                net.labels.push_back(std::move(labels));
            } else {
                out.explicit_values = false;
                net.labels.push_back(index_labels(arity));
            }
        }
        std::vector<std::vector<std::size_t>> parents(net.names.size());
        if (doc.contains("parents")) {
            for (const auto& [child, plist] : doc["parents"].items()) {
                auto c = index.find(child);
                if (c == index.end()) detail::data_error(source + ": unknown variable '" + child + "' in parents");
                for (const auto& p : plist) {
                    auto it = index.find(p.get<std::string>());
                    if (it == index.end())
                        detail::data_error(source + ": unknown parent '" + p.get<std::string>() + "'");
                    parents[c->second].push_back(it->second);
                }
            }
        }
        net.structure = DagStructure(std::move(parents), net.names);
        if (doc.contains("cpts")) {
            for (std::size_t i = 0; i < net.names.size(); ++i) {
                if (!doc["cpts"].contains(net.names[i]))
                    detail::data_error(source + ": missing CPT for '" + net.names[i] + "'");
                std::vector<double> flat;
                for (const auto& row : doc["cpts"][net.names[i]])
                    for (const auto& v : row) flat.push_back(v.get<double>());
                net.cpts.push_back(std::move(flat));
            }
            net.validate();
        }
    } catch (const nlohmann::json::exception& e) {
        detail::data_error(source + ": " + e.what());
    }
    return out;
}

inline NetworkDocument read_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::data_error("cannot open '" + path + "'");
    return parse_network(in, path);
}

inline nlohmann::ordered_json network_to_json(const BayesianNetwork& net, bool include_cpts) {
    nlohmann::ordered_json doc;
    doc["variables"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < net.size(); ++i) {
        nlohmann::ordered_json v;
        v["name"] = net.names[i];
        v["arity"] = net.arities[i];
        if (i < net.labels.size()) v["values"] = net.labels[i];
        doc["variables"].push_back(std::move(v));
    }
    doc["parents"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto plist = nlohmann::ordered_json::array();
        for (auto p : net.structure.parents(i)) plist.push_back(net.names[p]);
        doc["parents"][net.names[i]] = std::move(plist);
    }
    if (include_cpts && !net.cpts.empty()) {
        doc["cpts"] = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < net.size(); ++i) {
            auto rows = nlohmann::ordered_json::array();
            const std::size_t r = net.arities[i];
            for (std::size_t j = 0; j * r < net.cpts[i].size(); ++j)
                rows.push_back(std::vector<double>(net.cpts[i].begin() + j * r, net.cpts[i].begin() + (j + 1) * r));
            doc["cpts"][net.names[i]] = std::move(rows);
        }
    }
    return doc;
}

inline void write_network(const BayesianNetwork& net, std::ostream& out, bool include_cpts = true) {
    out << network_to_json(net, include_cpts).dump(2) << '\n';
}

/// Structure-only network document over a dataset's variables.
inline BayesianNetwork structure_only(const Dataset& data, const DagStructure& g) {
    BayesianNetwork net;
    net.structure = g.with_names(data.names());
    net.names = data.names();
    net.arities = data.arities();
    for (std::size_t i = 0; i < data.num_vars(); ++i) net.labels.push_back(data.labels(i));
    return net;
}

/// Loads data for scoring against a network document: columns are matched
/// by name. Explicit "values" fix the category mapping; otherwise the default
/// index labels are used when they cover every observed string, and the
/// sorted-string rule with the network's arities applies as a fallback.
inline Dataset load_dataset_for_network(const std::string& path, const NetworkDocument& doc) {
    const auto& net = doc.net;
    if (doc.explicit_values) return load_dataset_with_vocabulary(path, net.names, net.labels);
    try {
        return load_dataset_with_vocabulary(path, net.names, net.labels);
    } catch (const DataError&) {
        auto raw = read_csv_file(path);
        if (raw.header != net.names) throw;
        return load_dataset(path, net.arities);
    }
}

}  // namespace qnml
