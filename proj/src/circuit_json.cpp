#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "klmsim/circuit.hpp"

namespace klmsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("circuit parse: " + what);
}

// Strict object access: exactly the listed keys, nothing else.
void check_keys(const json& obj, std::initializer_list<const char*> keys, const char* where) {
    if (!obj.is_object()) {
        fail(std::string(where) + " must be a JSON object");
    }
    for (const char* key : keys) {
        if (!obj.contains(key)) {
            fail(std::string(where) + " missing key '" + key + "'");
        }
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : keys) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail(std::string(where) + " has unknown key '" + item.key() + "'");
        }
    }
}

std::size_t parse_mode(const json& value, const char* where) {
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        fail(std::string(where) + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(value.get<long long>());
}

double parse_angle(const json& value, const char* where) {
    if (!value.is_number()) {
        fail(std::string(where) + " must be a number (radians)");
    }
    return value.get<double>();
}

std::string parse_id(const json& value, const char* where) {
    if (!value.is_string() || value.get<std::string>().empty()) {
        fail(std::string(where) + " must be a non-empty string");
    }
    return value.get<std::string>();
}

Trigger parse_trigger(const json& value) {
    check_keys(value, {"op", "k"}, "trigger");
    Trigger trigger;
    const std::string op = parse_id(value.at("op"), "trigger op");
    if (op == "==") {
        trigger.op = Trigger::Op::Equal;
    } else if (op == ">=") {
        trigger.op = Trigger::Op::AtLeast;
    } else {
        fail("trigger op must be \"==\" or \">=\"");
    }
    if (!value.at("k").is_number_integer() || value.at("k").get<long long>() < 0) {
        fail("trigger k must be a non-negative integer");
    }
    trigger.threshold = value.at("k").get<int>();
    return trigger;
}

Element parse_element(const json& value) {
    if (!value.is_object() || !value.contains("type") || !value.at("type").is_string()) {
        fail("element must be an object with a string 'type'");
    }
    const std::string type = value.at("type").get<std::string>();
    if (type == "bs") {
        check_keys(value, {"type", "a", "b", "theta", "phi"}, "beamsplitter");
        return Beamsplitter{parse_mode(value.at("a"), "beamsplitter a"),
                            parse_mode(value.at("b"), "beamsplitter b"),
                            parse_angle(value.at("theta"), "beamsplitter theta"),
                            parse_angle(value.at("phi"), "beamsplitter phi")};
    }
    if (type == "ps") {
        check_keys(value, {"type", "mode", "phase"}, "phase shifter");
        return PhaseShifter{parse_mode(value.at("mode"), "phase shifter mode"),
                            parse_angle(value.at("phase"), "phase shifter phase")};
    }
    if (type == "det") {
        check_keys(value, {"type", "mode", "id"}, "detector");
        return Detector{parse_mode(value.at("mode"), "detector mode"),
                        parse_id(value.at("id"), "detector id")};
    }
    if (type == "cps") {
        check_keys(value, {"type", "mode", "phase", "controller", "trigger"},
                   "conditional phase shifter");
        return ConditionalPhaseShifter{
            parse_mode(value.at("mode"), "conditional phase shifter mode"),
            parse_angle(value.at("phase"), "conditional phase shifter phase"),
            parse_id(value.at("controller"), "conditional phase shifter controller"),
            parse_trigger(value.at("trigger"))};
    }
    fail("unknown element type '" + type + "'");
}

}  // namespace

Circuit circuit_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        fail(std::string("invalid JSON: ") + err.what());
    }
    check_keys(doc, {"modes", "input_modes", "elements"}, "circuit");

    Circuit circuit;
    if (!doc.at("modes").is_number_integer() || doc.at("modes").get<long long>() < 1) {
        fail("'modes' must be a positive integer");
    }
    circuit.mode_count = static_cast<std::size_t>(doc.at("modes").get<long long>());

    if (!doc.at("input_modes").is_array()) {
        fail("'input_modes' must be an array");
    }
    for (const auto& entry : doc.at("input_modes")) {
        circuit.input_modes.push_back(parse_mode(entry, "input mode"));
    }

    if (!doc.at("elements").is_array()) {
        fail("'elements' must be an array");
    }
    for (const auto& entry : doc.at("elements")) {
        circuit.elements.push_back(parse_element(entry));
    }
    return circuit;
}

Circuit circuit_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("circuit parse: file not found: " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return circuit_from_json_text(text);
}

std::string circuit_to_json_text(const Circuit& circuit) {
    json doc;
    doc["modes"] = circuit.mode_count;
    doc["input_modes"] = circuit.input_modes;
    doc["elements"] = json::array();
    for (const Element& element : circuit.elements) {
        json entry;
        if (const auto* bs = std::get_if<Beamsplitter>(&element)) {
            entry = {{"type", "bs"}, {"a", bs->mode_a}, {"b", bs->mode_b},
                     {"theta", bs->theta}, {"phi", bs->phi}};
        } else if (const auto* ps = std::get_if<PhaseShifter>(&element)) {
            entry = {{"type", "ps"}, {"mode", ps->mode}, {"phase", ps->phase}};
        } else if (const auto* det = std::get_if<Detector>(&element)) {
            entry = {{"type", "det"}, {"mode", det->mode}, {"id", det->id}};
        } else {
            const auto& cps = std::get<ConditionalPhaseShifter>(element);
            entry = {{"type", "cps"},
                     {"mode", cps.mode},
                     {"phase", cps.phase},
                     {"controller", cps.controller},
                     {"trigger",
                      {{"op", cps.trigger.op == Trigger::Op::Equal ? "==" : ">="},
                       {"k", cps.trigger.threshold}}}};
        }
        doc["elements"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

}  // namespace klmsim
