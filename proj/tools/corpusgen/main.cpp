// Writes the 62-sample synthetic evaluation corpus (benign PE files carrying
// evasion-style indicator strings/imports) plus its verdicts.csv.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "mirage/corpus/corpus.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mirage-corpusgen - generate the synthetic evaluation corpus"};
    std::string out_dir = "corpus";
    bool list = false;
    app.add_option("-o,--out", out_dir, "output directory (default: ./corpus)");
    app.add_flag("--list", list, "print the manifest after writing");
    CLI11_PARSE(app, argc, argv);

    try {
        auto written = mirage::corpus::write_corpus(out_dir);
        std::cout << "wrote " << written.size() << " samples + verdicts.csv to " << out_dir
                  << "\n";
        if (list) {
            for (const auto& w : written) {
                std::printf("%s  %s  family=%-8s group=%c signed=%d verdict=%s\n", w.md5.c_str(),
                            w.blueprint.filename.c_str(), w.blueprint.family.c_str(),
                            w.blueprint.group ? w.blueprint.group : '-',
                            w.blueprint.with_certificate ? 1 : 0,
                            w.blueprint.verdict.empty() ? "(none)" : w.blueprint.verdict.c_str());
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
