#include <algorithm>

#include "contractive/mapdef.hpp"

namespace contractive::mapdef {

namespace {

struct Source {
    const char* text;
    std::vector<std::string> notes;
};

std::vector<CorpusEntry> build_corpus() {
    const std::vector<Source> sources = {
        {"name=ex1\ndim=1\ndomain=[0,1]\nnorm=euclidean\nexpr=1 - x\n",
         {"unique fixed point 1/2",
          "not a Banach contraction: the pair (0,1) gives |Tx-Ty| = |x-y|",
          "T_lambda is a Banach contraction for lambda in (0,1/2) with constant |1-2 lambda|",
          "Picard orbit from 0 is the 2-cycle 0,1,0,..."}},
        {"name=ex2\ndim=1\ndomain=[0,1]\nnorm=euclidean\nexpr=1 - x\n",
         {"same map as ex1",
          "(1-2a, a)-enriched Kannan for every a in [0,1/2): T_lambda is Kannan with constant a at lambda = 1/(2-2a)"}},
        {"name=ex3\ndim=1\ndomain=[0,1]\nnorm=euclidean\nexpr=1 - x\n",
         {"same map as ex1", "not a Chatterjea map: the pair (0,1) gives 1 <= 0",
          "enriched Chatterjea claim: T_lambda Chatterjea with constant b at lambda = (b+2)/(b+3); "
          "the sampled Chatterjea constant at that lambda is (b+1)/2, and constant b is reached at "
          "lambda = (2b+1)/(2b+2)"}},
        {"name=ex4\ndim=1\ndomain=[0,4/3]\nnorm=euclidean\npiece [0, 2/3) -> 1 - x\npiece [2/3, 4/3] -> 2 - x\n",
         {"fixed points {1/2, 1}", "not an almost contraction for any L >= 0",
          "T_lambda is an almost contraction (enriched almost contraction)"}},
        {"name=ex5\ndim=1\ndomain=[1/2,2]\nnorm=euclidean\nexpr=1/x\n",
         {"unique fixed point 1", "not nonexpansive: the pair (1, 1/2) gives 1 <= 1/2",
          "T_lambda is nonexpansive (enriched nonexpansive); lambda = 0.4 works"}},
        {"name=ex6\ndim=1\ndomain=[1/2,2]\nnorm=euclidean\nexpr=1/x\n",
         {"same map as ex5",
          "k-strictly pseudocontractive for k in (3/5,1); the required k tends to 3/5 as x,y -> 1/2",
          "not nonexpansive"}},
        {"name=ex7\ndim=1\ndomain=[0,1]\nambient=[-1,1]\nnorm=euclidean\npiece x = 0 -> 0\n"
         "piece (0, 1] -> (2/3) * x * sin(1/x)\n",
         {"fixed point set {0}", "demicontractive for every k < 1 and quasi-nonexpansive",
          "not nonexpansive: pair (2/pi, 2/(3 pi)) gives |Tx-Ty| = 16/(9 pi) > 4/(3 pi)",
          "not pseudocontractive",
          "takes negative values, so it maps [0,1] into [-1,1] rather than into [0,1]; "
          "the entry samples [0,1] and checks images against [-1,1]"}},
    };

    std::vector<CorpusEntry> out;
    out.reserve(sources.size());
    for (const Source& s : sources) {
        MapSpec spec = parse_map_spec(s.text);
        CorpusEntry e;
        e.name = spec.name;
        e.source = s.text;
        e.expr = std::move(spec.expr);
        e.domain = spec.domain;
        e.ambient = spec.ambient;
        e.norm = spec.norm;
        e.notes = s.notes;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = build_corpus();
    return entries;
}

const CorpusEntry& corpus_entry(std::string_view name) {
    const auto& all = corpus();
    const auto it = std::find_if(all.begin(), all.end(), [&](const CorpusEntry& e) { return e.name == name; });
    if (it == all.end()) throw PreconditionError("unknown corpus entry '" + std::string(name) + "'");
    return *it;
}

}  // namespace contractive::mapdef
