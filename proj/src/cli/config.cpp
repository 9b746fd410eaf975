#include "gexp/cli/config.hpp"

#include "gexp/claims.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gexp::cli {

using nlohmann::json;

std::string to_string(Task task)
{
    switch (task) {
    case Task::solve: return "solve";
    case Task::axioms: return "axioms";
    case Task::domination: return "domination";
    case Task::dual: return "dual";
    case Task::penalize: return "penalize";
    case Task::represent: return "represent";
    case Task::converge: return "converge";
    }
    return "unknown";
}

std::optional<Task> parse_task(const std::string& name)
{
    for (Task t : {Task::solve, Task::axioms, Task::domination, Task::dual, Task::penalize, Task::represent,
                   Task::converge}) {
        if (to_string(t) == name) {
            return t;
        }
    }
    return std::nullopt;
}

ObjectReader::ObjectReader(const json& object, std::string pointer) : object_(object), pointer_(std::move(pointer))
{
    if (!object_.is_object()) {
        throw ConfigError((pointer_.empty() ? std::string("/") : pointer_) + ": expected an object");
    }
}

bool ObjectReader::has(const std::string& key) const
{
    return object_.contains(key);
}

void ObjectReader::fail(const std::string& key, const std::string& message) const
{
    throw ConfigError(pointer(key) + ": " + message);
}

const json* ObjectReader::get(const std::string& key)
{
    used_.push_back(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
}

double ObjectReader::number(const std::string& key, std::optional<double> fallback)
{
    const json* v = get(key);
    if (v == nullptr) {
        if (!fallback) {
            fail(key, "required number is missing");
        }
        return *fallback;
    }
    if (!v->is_number()) {
        fail(key, "expected a number");
    }
    return v->get<double>();
}

long long ObjectReader::integer(const std::string& key, std::optional<long long> fallback)
{
    const json* v = get(key);
    if (v == nullptr) {
        if (!fallback) {
            fail(key, "required integer is missing");
        }
        return *fallback;
    }
    if (!v->is_number_integer()) {
        fail(key, "expected an integer");
    }
    return v->get<long long>();
}

std::string ObjectReader::text(const std::string& key, std::optional<std::string> fallback)
{
    const json* v = get(key);
    if (v == nullptr) {
        if (!fallback) {
            fail(key, "required string is missing");
        }
        return *fallback;
    }
    if (!v->is_string()) {
        fail(key, "expected a string");
    }
    return v->get<std::string>();
}

bool ObjectReader::boolean(const std::string& key, std::optional<bool> fallback)
{
    const json* v = get(key);
    if (v == nullptr) {
        if (!fallback) {
            fail(key, "required boolean is missing");
        }
        return *fallback;
    }
    if (!v->is_boolean()) {
        fail(key, "expected true or false");
    }
    return v->get<bool>();
}

std::vector<double> ObjectReader::numbers(const std::string& key, std::optional<std::vector<double>> fallback)
{
    const json* v = get(key);
    if (v == nullptr) {
        if (!fallback) {
            fail(key, "required array is missing");
        }
        return *fallback;
    }
    if (!v->is_array()) {
        fail(key, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) {
            throw ConfigError(pointer(key) + "/" + std::to_string(i) + ": expected a number");
        }
        out.push_back((*v)[i].get<double>());
    }
    return out;
}

const json& ObjectReader::child(const std::string& key)
{
    const json* v = get(key);
    if (v == nullptr) {
        fail(key, "required value is missing");
    }
    return *v;
}

void ObjectReader::finish() const
{
    for (auto it = object_.begin(); it != object_.end(); ++it) {
        if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) {
            throw ConfigError(pointer(it.key()) + ": unknown key");
        }
    }
}

namespace {

TreeSpec parse_tree(const json& j)
{
    ObjectReader r(j, "/tree");
    TreeSpec t;
    t.horizon = r.number("horizon", 1.0);
    const long long steps = r.integer("steps");
    const long long cap = r.integer("depth_cap", kDefaultDepthCap);
    t.layout = r.text("layout", "auto");
    r.finish();
    if (!(t.horizon > 0.0)) {
        r.fail("horizon", "must be positive");
    }
    if (steps < 1 || steps > kRecombiningDepthCap) {
        r.fail("steps", "must lie in [1, " + std::to_string(kRecombiningDepthCap) + "]");
    }
    if (cap < 1 || cap > 62) {
        r.fail("depth_cap", "must lie in [1, 62]");
    }
    if (t.layout != "auto" && t.layout != "full" && t.layout != "recombining") {
        r.fail("layout", "expected \"auto\", \"full\" or \"recombining\"");
    }
    t.steps = static_cast<int>(steps);
    t.depth_cap = static_cast<int>(cap);
    if (t.layout == "full" && t.steps > t.depth_cap) {
        r.fail("steps", std::to_string(t.steps) + " exceeds the depth cap of " + std::to_string(t.depth_cap) +
                            " for a full tree");
    }
    return t;
}

GeneratorSpec parse_generator(const json& j, const std::string& pointer)
{
    ObjectReader r(j, pointer);
    const std::string kind = r.text("kind");
    GeneratorSpec g;
    const auto k = parse_builtin_kind(kind);
    if (!k) {
        r.fail("kind", "unknown generator kind '" + kind + "'");
    }
    g.kind = *k;
    switch (g.kind) {
    case BuiltinKind::quadratic_upper:
    case BuiltinKind::quadratic_lower:
        g.params.mu = r.number("mu", 0.0);
        g.params.nu = r.number("nu", 0.0);
        break;
    case BuiltinKind::entropy: g.params.nu = r.number("nu"); break;
    case BuiltinKind::sublinear_interval:
        g.params.lo = r.number("lo");
        g.params.hi = r.number("hi");
        g.params.mu = r.number("mu", 0.0);
        break;
    case BuiltinKind::scaled_abs: g.params.mu = r.number("mu"); break;
    }
    r.finish();
    try {
        (void)build_generator(g);
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(pointer + ": " + e.what());
    }
    return g;
}

DrmSpec parse_drm(const json& j)
{
    ObjectReader r(j, "/drm");
    DrmSpec d;
    d.source = r.text("source");
    if (d.source == "entropy") {
        d.nu = r.number("nu");
        if (!(d.nu > 0.0)) {
            r.fail("nu", "must be positive");
        }
    }
    else if (d.source == "generator") {
        d.generator = parse_generator(r.child("generator"), "/drm/generator");
    }
    else if (d.source != "planted_nonmonotone") {
        r.fail("source", "expected \"entropy\", \"generator\" or \"planted_nonmonotone\"");
    }
    r.finish();
    return d;
}

std::vector<Claim> build_claims(const json& spec, const std::string& pointer, std::uint64_t seed)
{
    ObjectReader r(spec, pointer);
    const std::string family = r.text("family");
    std::vector<Claim> out;
    if (family == "constant") {
        out.push_back(claims::constant(r.number("c")));
    }
    else if (family == "linear") {
        const double a = r.number("a", 1.0);
        out.push_back(claims::linear(a, r.number("b", 0.0)));
    }
    else if (family == "call" || family == "put" || family == "indicator") {
        const double k = r.number("strike");
        const double a = r.number("a", 1.0);
        out.push_back(family == "call" ? claims::call(k, a) : family == "put" ? claims::put(k, a) : claims::indicator(k, a));
    }
    else if (family == "square") {
        out.push_back(claims::square(r.number("a", 1.0)));
    }
    else if (family == "path_max") {
        out.push_back(claims::path_max(r.number("a", 1.0)));
    }
    else if (family == "random") {
        const long long s = r.integer("seed", static_cast<long long>(seed));
        const long long count = r.integer("count", 1);
        const double scale = r.number("scale", 1.0);
        if (count < 1 || count > 10000) {
            r.fail("count", "must lie in [1, 10000]");
        }
        if (s < 0) {
            r.fail("seed", "must be non-negative");
        }
        out = claims::random_family(static_cast<std::uint64_t>(s), static_cast<int>(count), scale);
    }
    else {
        r.fail("family", "unknown claim family '" + family +
                             "' (constant, linear, call, put, indicator, square, path_max, random)");
    }
    r.finish();
    return out;
}

}  // namespace

Generator build_generator(const GeneratorSpec& spec)
{
    return make_builtin(spec.kind, spec.params);
}

DynamicRiskMeasure build_drm(const DrmSpec& spec, const ScenarioTree& tree)
{
    if (spec.source == "entropy") {
        return DynamicRiskMeasure::entropy(spec.nu, tree);
    }
    if (spec.source == "generator") {
        return DynamicRiskMeasure::from_generator(build_generator(*spec.generator), tree);
    }
    return planted_nonmonotone(tree);
}

std::vector<Claim> ScenarioConfig::claims() const
{
    std::vector<Claim> out;
    for (std::size_t i = 0; i < claim_specs.size(); ++i) {
        auto part = build_claims(claim_specs[i], "/claims/" + std::to_string(i), seed);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

ScenarioConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e) {
        throw ConfigError(std::string("syntax: ") + e.what());
    }
    ScenarioConfig cfg;
    cfg.echo = doc;
    ObjectReader r(doc, "");
    if (r.has("task")) {
        const std::string t = r.text("task");
        cfg.task = parse_task(t);
        if (!cfg.task) {
            r.fail("task", "unknown task '" + t + "'");
        }
    }
    cfg.tree = parse_tree(r.child("tree"));
    if (r.has("drm") && r.has("generator")) {
        r.fail("generator", "give either \"drm\" or \"generator\", not both");
    }
    if (r.has("drm")) {
        cfg.drm = parse_drm(r.child("drm"));
    }
    else if (r.has("generator")) {
        cfg.drm = DrmSpec{"generator", 0.0, parse_generator(r.child("generator"), "/generator")};
    }
    if (r.has("seed")) {
        const long long s = r.integer("seed");
        if (s < 0) {
            r.fail("seed", "must be non-negative");
        }
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (r.has("claim") && r.has("claims")) {
        r.fail("claims", "give either \"claim\" or \"claims\", not both");
    }
    if (r.has("claim")) {
        cfg.claim_specs.push_back(r.child("claim"));
    }
    else if (r.has("claims")) {
        const json& list = r.child("claims");
        if (!list.is_array()) {
            r.fail("claims", "expected an array of claim objects");
        }
        for (const auto& c : list) {
            cfg.claim_specs.push_back(c);
        }
    }
    if (r.has("params")) {
        cfg.params = r.child("params");
        if (!cfg.params.is_object()) {
            r.fail("params", "expected an object");
        }
    }
    cfg.output = r.text("output", "");
    r.finish();
    // Validate claim specs now; "claim" is reported under /claim.
    for (std::size_t i = 0; i < cfg.claim_specs.size(); ++i) {
        const std::string ptr = doc.contains("claim") ? "/claim" : "/claims/" + std::to_string(i);
        (void)build_claims(cfg.claim_specs[i], ptr, cfg.seed);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace gexp::cli
