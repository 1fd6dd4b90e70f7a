#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "madios/cli.hpp"

namespace {

void add_config_flags(CLI::App& cmd, madios::CommandOptions& options, std::string& config,
                      std::vector<std::pair<std::string, std::string*>>& overrides, std::string* storage) {
    cmd.add_option("--config", config, "key=value config file");
    const char* keys[] = {"eta", "alpha", "sigma", "min_support"};
    const char* flags[] = {"--eta", "--alpha", "--sigma", "--min-support"};
    for (int i = 0; i < 4; ++i) {
        cmd.add_option(flags[i], storage[i], std::string("override ") + keys[i]);
        overrides.emplace_back(keys[i], &storage[i]);
    }
    cmd.add_option("--max-iterations", storage[4], "override max_iterations");
    overrides.emplace_back("max_iterations", &storage[4]);
    cmd.add_option("--max-len", options.max_length, "keep sentences with at most this many tokens");
    cmd.add_option("--manifest", options.manifest_path, "run manifest path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grammar induction and role labeling"};
    app.require_subcommand(1);

    madios::CommandOptions options;
    std::string config;
    std::string storage[5];
    std::vector<std::pair<std::string, std::string*>> overrides;
    std::string corpus, grammar, annotations;

    auto* induce = app.add_subcommand("induce", "induce a grammar from a raw corpus");
    induce->add_option("corpus", corpus, "one sentence per line")->required();
    induce->add_option("-o,--output", grammar, "grammar file to write")->required();
    add_config_flags(*induce, options, config, overrides, storage);

    auto* parse = app.add_subcommand("parse", "parse sentences with a grammar");
    parse->add_option("grammar", grammar)->required();
    parse->add_option("corpus", corpus)->required();
    parse->add_option("--max-len", options.max_length, "keep sentences with at most this many tokens");
    parse->add_option("--manifest", options.manifest_path, "run manifest path");

    auto* label = app.add_subcommand("label", "cross-validate the role classifier");
    label->add_option("grammar", grammar)->required();
    label->add_option("corpus", corpus)->required();
    label->add_option("annotations", annotations, "sid<TAB>start<TAB>end<TAB>role lines")->required();
    label->add_option("--folds", options.folds, "number of folds")->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
    label->add_option("--seed", options.seed, "fold assignment seed");
    label->add_flag("--exclude-null-label", options.exclude_null_label, "drop <false,false,false> instances");
    label->add_flag("--key-value", options.key_value_report, "print key=value lines instead of a table");
    label->add_option("--instances", options.instances_out, "write the feature instances here");
    label->add_option("--max-len", options.max_length, "keep sentences with at most this many tokens");
    label->add_option("--manifest", options.manifest_path, "run manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : madios::kExitUsage;
    }

    if (!config.empty()) options.config_path = config;
    for (const auto& [key, value] : overrides) {
        if (!value->empty()) options.overrides.emplace_back(key, *value);
    }

    if (*induce) return madios::cmd_induce(corpus, grammar, options, std::cout, std::cerr);
    if (*parse) return madios::cmd_parse(grammar, corpus, options, std::cout, std::cerr);
    return madios::cmd_label(grammar, corpus, annotations, options, std::cout, std::cerr);
}
