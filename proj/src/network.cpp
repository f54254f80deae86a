#include "due/network.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace due {

using json = nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ParseError("network document: unknown key '" + it.key() + "' at " + where);
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    if (!obj.is_object())
        throw ParseError("network document: expected an object at " + where);
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError("network document: missing key '" + std::string(key) + "' at " + where);
    return *it;
}

std::string require_string(const json& obj, const std::string& where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_string())
        throw ParseError("network document: '" + std::string(key) + "' at " + where + " must be a string");
    return v.get<std::string>();
}

double require_number(const json& obj, const std::string& where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_number())
        throw ParseError("network document: '" + std::string(key) + "' at " + where + " must be a number");
    return v.get<double>();
}

const json& require_array(const json& obj, const std::string& where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_array())
        throw ParseError("network document: '" + std::string(key) + "' at " + where + " must be an array");
    return v;
}

std::string od_label(const Network& net, std::size_t od) {
    const auto& o = net.od_pairs[od];
    return net.nodes[o.origin] + "-" + net.nodes[o.destination];
}

void enumerate_from(const Network& net, std::size_t node, std::size_t destination,
                    const std::vector<std::vector<std::size_t>>& out_links, std::vector<bool>& on_path,
                    std::vector<std::size_t>& stack, std::vector<std::vector<std::size_t>>& found,
                    std::size_t max_paths) {
    if (found.size() >= max_paths)
        return;
    if (node == destination) {
        found.push_back(stack);
        return;
    }
    for (std::size_t l : out_links[node]) {
        std::size_t next = net.links[l].head;
        if (on_path[next])
            continue;
        on_path[next] = true;
        stack.push_back(l);
        enumerate_from(net, next, destination, out_links, on_path, stack, found, max_paths);
        stack.pop_back();
        on_path[next] = false;
        if (found.size() >= max_paths)
            return;
    }
}

}  // namespace

std::size_t Network::node_index(std::string_view id) const {
    auto it = std::find(nodes.begin(), nodes.end(), id);
    if (it == nodes.end())
        throw std::invalid_argument("unknown node '" + std::string(id) + "'");
    return static_cast<std::size_t>(it - nodes.begin());
}

std::size_t Network::link_index(std::string_view id) const {
    auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.id == id; });
    if (it == links.end())
        throw std::invalid_argument("unknown link '" + std::string(id) + "'");
    return static_cast<std::size_t>(it - links.begin());
}

std::vector<std::size_t> Network::paths_of(std::size_t od) const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < paths.size(); ++p)
        if (paths[p].od_index == od)
            out.push_back(p);
    return out;
}

double Network::free_flow_time(std::size_t p) const {
    double sum = 0.0;
    for (std::size_t l : paths.at(p).links)
        sum += links[l].free_flow_time;
    return sum;
}

void validate(const Network& net) {
    std::set<std::string> seen;
    for (const auto& n : net.nodes)
        if (!seen.insert(n).second)
            throw ValidationError("duplicate node id '" + n + "'");

    seen.clear();
    for (const auto& l : net.links) {
        if (!seen.insert(l.id).second)
            throw ValidationError("duplicate link id '" + l.id + "'");
        if (l.tail >= net.nodes.size() || l.head >= net.nodes.size())
            throw ValidationError("link '" + l.id + "' references a node that does not exist");
        if (!std::isfinite(l.free_flow_time) || !(l.free_flow_time > 0.0))
            throw ValidationError("link '" + l.id + "': alpha must be finite and > 0");
        if (!std::isfinite(l.congestion_slope) || l.congestion_slope < 0.0)
            throw ValidationError("link '" + l.id + "': beta must be finite and >= 0");
    }

    for (std::size_t od = 0; od < net.od_pairs.size(); ++od) {
        const auto& o = net.od_pairs[od];
        if (o.origin >= net.nodes.size() || o.destination >= net.nodes.size())
            throw ValidationError("od pair " + std::to_string(od) + " references a node that does not exist");
        if (o.origin == o.destination)
            throw ValidationError("od pair " + std::to_string(od) + ": origin equals destination");
        try {
            validate(o.inverse_demand);
        } catch (const std::invalid_argument& e) {
            throw ValidationError("od pair " + od_label(net, od) + ": " + e.what());
        }
    }

    seen.clear();
    std::vector<std::size_t> path_count(net.od_pairs.size(), 0);
    for (const auto& p : net.paths) {
        if (!seen.insert(p.id).second)
            throw ValidationError("duplicate path id '" + p.id + "'");
        if (p.od_index >= net.od_pairs.size())
            throw ValidationError("path '" + p.id + "': od_index out of range");
        if (p.links.empty())
            throw ValidationError("path '" + p.id + "' has no links");
        const auto& o = net.od_pairs[p.od_index];
        std::size_t at = o.origin;
        std::vector<bool> visited(net.nodes.size(), false);
        visited[at] = true;
        for (std::size_t l : p.links) {
            if (l >= net.links.size())
                throw ValidationError("path '" + p.id + "' references a link that does not exist");
            if (net.links[l].tail != at)
                throw ValidationError("path '" + p.id + "': link '" + net.links[l].id +
                                      "' does not start where the previous link ends");
            at = net.links[l].head;
            if (visited[at])
                throw ValidationError("path '" + p.id + "' revisits node '" + net.nodes[at] + "'");
            visited[at] = true;
        }
        if (at != o.destination)
            throw ValidationError("path '" + p.id + "' does not end at the destination of its od pair");
        ++path_count[p.od_index];
    }
    for (std::size_t od = 0; od < net.od_pairs.size(); ++od)
        if (path_count[od] == 0)
            throw ValidationError("od pair " + od_label(net, od) + " has no path");
}

std::vector<Path> enumerate_paths(const Network& net, std::size_t od, std::size_t max_paths) {
    if (od >= net.od_pairs.size())
        throw std::invalid_argument("enumerate_paths: od index " + std::to_string(od) + " out of range");
    const auto& o = net.od_pairs[od];
    if (o.origin >= net.nodes.size() || o.destination >= net.nodes.size())
        throw std::invalid_argument("enumerate_paths: origin or destination missing from the network");

    std::vector<std::vector<std::size_t>> out_links(net.nodes.size());
    for (std::size_t l = 0; l < net.links.size(); ++l)
        out_links[net.links[l].tail].push_back(l);
    for (auto& ls : out_links)
        std::sort(ls.begin(), ls.end(), [&](std::size_t a, std::size_t b) { return net.links[a].id < net.links[b].id; });

    std::vector<bool> on_path(net.nodes.size(), false);
    on_path[o.origin] = true;
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> found;
    if (max_paths > 0)
        enumerate_from(net, o.origin, o.destination, out_links, on_path, stack, found, max_paths);

    std::vector<Path> paths;
    paths.reserve(found.size());
    const std::string label = od_label(net, od);
    for (std::size_t i = 0; i < found.size(); ++i)
        paths.push_back(Path{label + "#" + std::to_string(i), od, std::move(found[i])});
    return paths;
}

Network parse_network(std::string_view document, const ParseOptions& options) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("network document: top level must be an object");
    reject_unknown_keys(doc, "/", {"nodes", "links", "od_pairs", "paths"});

    Network net;
    const json& nodes = require_array(doc, "/", "nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].is_string())
            throw ParseError("network document: /nodes/" + std::to_string(i) + " must be a string");
        net.nodes.push_back(nodes[i].get<std::string>());
    }

    auto node_ref = [&](const std::string& id, const std::string& owner) {
        try {
            return net.node_index(id);
        } catch (const std::invalid_argument&) {
            throw ValidationError(owner + " references unknown node '" + id + "'");
        }
    };

    const json& links = require_array(doc, "/", "links");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string where = "/links/" + std::to_string(i);
        const json& l = links[i];
        if (!l.is_object())
            throw ParseError("network document: expected an object at " + where);
        reject_unknown_keys(l, where, {"id", "from", "to", "alpha", "beta"});
        Link link;
        link.id = require_string(l, where, "id");
        link.tail = node_ref(require_string(l, where, "from"), "link '" + link.id + "'");
        link.head = node_ref(require_string(l, where, "to"), "link '" + link.id + "'");
        link.free_flow_time = require_number(l, where, "alpha");
        link.congestion_slope = require_number(l, where, "beta");
        net.links.push_back(std::move(link));
    }

    const json& ods = require_array(doc, "/", "od_pairs");
    for (std::size_t i = 0; i < ods.size(); ++i) {
        const std::string where = "/od_pairs/" + std::to_string(i);
        const json& o = ods[i];
        if (!o.is_object())
            throw ParseError("network document: expected an object at " + where);
        reject_unknown_keys(o, where, {"origin", "destination", "inverse_demand"});
        OdPair od;
        od.origin = node_ref(require_string(o, where, "origin"), "od pair " + std::to_string(i));
        od.destination = node_ref(require_string(o, where, "destination"), "od pair " + std::to_string(i));
        const json& inv = require(o, where, "inverse_demand");
        const std::string inv_where = where + "/inverse_demand";
        if (!inv.is_object())
            throw ParseError("network document: expected an object at " + inv_where);
        reject_unknown_keys(inv, inv_where, {"type", "a", "b"});
        const std::string type = require_string(inv, inv_where, "type");
        if (type != "linear")
            throw ParseError("network document: unsupported inverse_demand type '" + type + "' at " + inv_where);
        od.inverse_demand.intercept = require_number(inv, inv_where, "a");
        od.inverse_demand.slope = require_number(inv, inv_where, "b");
        net.od_pairs.push_back(od);
    }

    if (auto it = doc.find("paths"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("network document: 'paths' at / must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "/paths/" + std::to_string(i);
            const json& p = (*it)[i];
            if (!p.is_object())
                throw ParseError("network document: expected an object at " + where);
            reject_unknown_keys(p, where, {"id", "od_index", "links"});
            Path path;
            path.id = require_string(p, where, "id");
            const json& od_index = require(p, where, "od_index");
            if (!od_index.is_number_unsigned())
                throw ParseError("network document: 'od_index' at " + where + " must be a nonnegative integer");
            path.od_index = od_index.get<std::size_t>();
            if (path.od_index >= net.od_pairs.size())
                throw ValidationError("path '" + path.id + "' references od_index " + std::to_string(path.od_index) +
                                      " which does not exist");
            const json& ls = require_array(p, where, "links");
            for (std::size_t j = 0; j < ls.size(); ++j) {
                if (!ls[j].is_string())
                    throw ParseError("network document: " + where + "/links/" + std::to_string(j) + " must be a string");
                const std::string id = ls[j].get<std::string>();
                try {
                    path.links.push_back(net.link_index(id));
                } catch (const std::invalid_argument&) {
                    throw ValidationError("path '" + path.id + "' references unknown link '" + id + "'");
                }
            }
            net.paths.push_back(std::move(path));
        }
    } else {
        for (std::size_t od = 0; od < net.od_pairs.size(); ++od) {
            if (net.od_pairs[od].origin == net.od_pairs[od].destination)
                break;  // reported by validate()
            for (auto& p : enumerate_paths(net, od, options.max_paths))
                net.paths.push_back(std::move(p));
        }
    }

    validate(net);
    return net;
}

}  // namespace due
