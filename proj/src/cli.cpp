#include "madios/cli.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "madios/corpus.hpp"
#include "madios/error.hpp"
#include "madios/grammar.hpp"
#include "madios/srl.hpp"

namespace madios {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    std::string digest;
    try {
        digest = sha256_file(path);
    } catch (const IoError&) {
        digest = "missing";
    }
    inputs_.push_back({role, path.string(), digest});
}

void RunManifest::add_output(const std::string& role, const std::filesystem::path& path) {
    outputs_.emplace_back(role, path.string());
}

void RunManifest::set_config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }

void RunManifest::record_stage(const std::string& stage, double seconds) { timings_.emplace_back(stage, seconds); }

void RunManifest::finish(int exit_code, const std::string& message) {
    exit_code_ = exit_code;
    message_ = message;
}

std::string RunManifest::json() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_) j["config"][k] = v;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& in : inputs_) j["inputs"].push_back({{"role", in[0]}, {"path", in[1]}, {"sha256", in[2]}});
    j["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : outputs_) j["outputs"][k] = v;
    j["timings_seconds"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : timings_) j["timings_seconds"][k] = v;
    j["exit_code"] = exit_code_;
    j["status"] = exit_code_ == 0 ? "ok" : "failed";
    if (!message_.empty()) j["error"] = message_;
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << json();
}

InductionConfig resolve_config(const CommandOptions& options) {
    InductionConfig config = options.config_path ? load_config(*options.config_path) : InductionConfig{};
    for (const auto& [key, value] : options.overrides) config.set(key, value);
    config.validate();
    return config;
}

namespace {

struct Failure {
    int code;
    std::string message;
};

using Classifier = std::function<int(const Error&)>;

int always(int code, const Error&) { return code; }

int grammar_errors(const Error& e) {
    if (dynamic_cast<const IoError*>(&e)) return kExitInput;
    return kExitGrammar;
}

int annotation_errors(const Error& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return kExitData;
    return kExitInput;
}

class Runner {
public:
    explicit Runner(RunManifest& manifest) : manifest_(manifest) {}

    template <class F>
    auto stage(const std::string& name, const Classifier& classify, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto done = [&] {
            manifest_.record_stage(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        };
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                done();
            } else {
                auto result = f();
                done();
                return result;
            }
        } catch (const Error& e) {
            done();
            throw Failure{classify(e), name + ": " + e.what()};
        } catch (const std::exception& e) {
            done();
            throw Failure{kExitInput, name + ": " + e.what()};
        }
    }

private:
    RunManifest& manifest_;
};

LoadOptions load_options(const CommandOptions& options) { return LoadOptions{options.max_length}; }

void note_options(RunManifest& manifest, const CommandOptions& options) {
    if (options.config_path) manifest.set_config("config_file", options.config_path->string());
    for (const auto& [k, v] : options.overrides) manifest.set_config("override." + k, v);
    if (options.max_length) manifest.set_config("max_length", std::to_string(*options.max_length));
}

// Runs `body`, maps failures to exit codes and writes the manifest if asked.
int run(RunManifest& manifest, const std::optional<std::filesystem::path>& manifest_path, std::ostream& err,
        const std::function<void(Runner&)>& body) {
    Runner runner(manifest);
    int code = kExitOk;
    std::string message;
    try {
        body(runner);
    } catch (const Failure& f) {
        code = f.code;
        message = f.message;
    }
    manifest.finish(code, message);
    if (!message.empty()) err << "error: " << message << '\n';
    if (manifest_path) {
        try {
            manifest.write(*manifest_path);
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            if (code == kExitOk) code = kExitInput;
        }
    }
    return code;
}

}  // namespace

int cmd_induce(const std::filesystem::path& corpus_path, const std::filesystem::path& grammar_path,
               const CommandOptions& options, std::ostream& out, std::ostream& err) {
    RunManifest manifest("induce");
    manifest.add_input("corpus", corpus_path);
    if (options.config_path) manifest.add_input("config", *options.config_path);
    note_options(manifest, options);
    auto manifest_path = options.manifest_path.value_or(std::filesystem::path(grammar_path.string() + ".manifest.json"));
    manifest.add_output("grammar", grammar_path);
    manifest.add_output("manifest", manifest_path);

    return run(manifest, manifest_path, err, [&](Runner& r) {
        using namespace std::placeholders;
        const Classifier input = std::bind(always, kExitInput, _1);
        auto config = r.stage("config", input, [&] { return resolve_config(options); });
        std::istringstream resolved(config.to_string());
        for (std::string line; std::getline(resolved, line);) {
            auto eq = line.find('=');
            manifest.set_config(line.substr(0, eq), line.substr(eq + 1));
        }
        auto corpus = r.stage("load_corpus", input, [&] { return load_corpus(corpus_path, load_options(options)); });
        auto result = r.stage("induce", input, [&] { return induce(corpus, config); });
        auto rules = r.stage("extract_rules", std::bind(always, kExitGrammar, _1),
                             [&] { return extract_rules(result.graph, result.inventory); });
        r.stage("write_grammar", input, [&] {
            std::ofstream file(grammar_path);
            if (!file) throw IoError("cannot write " + grammar_path.string());
            file << serialize_rules(rules);
            if (!file) throw IoError("write failed for " + grammar_path.string());
        });
        std::size_t classes = 0;
        for (const auto& c : result.inventory.classes()) classes += c.active ? 1 : 0;
        out << "sentences: " << corpus.size() << '\n'
            << "filtered: " << corpus.filtered_ids().size() << '\n'
            << "patterns: " << result.active_patterns().size() << '\n'
            << "classes: " << classes << '\n'
            << "rules: " << rules.size() << '\n'
            << "passes: " << result.passes << '\n'
            << "merges: " << result.merges << '\n';
    });
}

int cmd_parse(const std::filesystem::path& grammar_path, const std::filesystem::path& corpus_path,
              const CommandOptions& options, std::ostream& out, std::ostream& err) {
    RunManifest manifest("parse");
    manifest.add_input("grammar", grammar_path);
    manifest.add_input("corpus", corpus_path);
    note_options(manifest, options);

    return run(manifest, options.manifest_path, err, [&](Runner& r) {
        using namespace std::placeholders;
        auto rules = r.stage("load_grammar", grammar_errors, [&] {
            auto loaded = load_rules(grammar_path);
            loaded.validate_closure();
            return loaded;
        });
        auto corpus = r.stage("load_corpus", std::bind(always, kExitInput, _1),
                              [&] { return load_corpus(corpus_path, load_options(options)); });
        r.stage("parse", std::bind(always, kExitGrammar, _1), [&] {
            SentenceParser parser(rules);
            std::ostringstream buffer;
            for (const auto& s : corpus.sentences()) buffer << bracketed(parser.parse(s.tokens)) << '\n';
            out << buffer.str();
        });
    });
}

int cmd_label(const std::filesystem::path& grammar_path, const std::filesystem::path& corpus_path,
              const std::filesystem::path& annotations_path, const CommandOptions& options, std::ostream& out,
              std::ostream& err) {
    if (options.folds < 2) {
        err << "error: --folds must be at least 2\n";
        return kExitUsage;
    }
    RunManifest manifest("label");
    manifest.add_input("grammar", grammar_path);
    manifest.add_input("corpus", corpus_path);
    manifest.add_input("annotations", annotations_path);
    note_options(manifest, options);
    manifest.set_config("folds", std::to_string(options.folds));
    manifest.set_config("seed", std::to_string(options.seed));
    manifest.set_config("exclude_null_label", options.exclude_null_label ? "true" : "false");
    if (options.instances_out) manifest.add_output("instances", *options.instances_out);

    return run(manifest, options.manifest_path, err, [&](Runner& r) {
        using namespace std::placeholders;
        const Classifier input = std::bind(always, kExitInput, _1);
        const Classifier data = std::bind(always, kExitData, _1);
        auto rules = r.stage("load_grammar", grammar_errors, [&] {
            auto loaded = load_rules(grammar_path);
            loaded.validate_closure();
            return loaded;
        });
        auto corpus = r.stage("load_corpus", input, [&] { return load_corpus(corpus_path, load_options(options)); });
        auto annotations = r.stage("load_annotations", annotation_errors,
                                   [&] { return load_annotations(annotations_path, corpus); });
        SentenceParser parser(rules);
        auto instances = r.stage("build_instances", data, [&] {
            return build_instances(parser, corpus, annotations, options.exclude_null_label);
        });
        if (options.instances_out) {
            r.stage("write_instances", input, [&] {
                std::ofstream file(*options.instances_out);
                if (!file) throw IoError("cannot write " + options.instances_out->string());
                write_instances(file, instances);
            });
        }
        auto report = r.stage("cross_validate", data,
                              [&] { return cross_validate(instances, options.folds, options.seed); });
        out << (options.key_value_report ? report.key_values() : report.table());
    });
}

}  // namespace madios
