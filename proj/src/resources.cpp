#include "commlabel/textprep.hpp"

namespace commlabel {

namespace {

// Common English function words. Contractions are listed by their
// fragments since the tokenizer splits on apostrophes.
constexpr std::string_view kStopwords = R"(
i me my myself we our ours ourselves you your yours yourself yourselves
he him his himself she her hers herself it its itself they them their
theirs themselves what which who whom this that these those am is are was
were be been being have has had having do does did doing a an the and but
if or because as until while of at by for with about against between into
through during before after above below to from up down in out on off over
under again further then once here there when where why how all any both
each few more most other some such no nor not only own same so than too
very s t can will just don should now d ll m o re ve y ain aren couldn
didn doesn hadn hasn haven isn ma mightn mustn needn shan shouldn wasn
weren won wouldn
)";

constexpr std::string_view kLexicon =
    "subway\ttube,underground,metro\n"
    "train\trail,railway\n"
    "car\tauto,automobile\n"
    "parking\tgarage,lot\n"
    "restaurant\teatery,diner\n"
    "food\tmeal,cuisine\n"
    "ticket\tpass,admission\n"
    "movie\tfilm,picture\n"
    "show\tperformance,play\n"
    "address\tlocation\n"
    "agent\trepresentative,operator\n"
    "human\tperson\n"
    "job\temployment,position\n"
    "lost\tmissing\n"
    "free\tcomplimentary\n"
    "price\tcost,fee\n"
    "tour\ttrip,visit\n";

}  // namespace

const StopwordSet& default_stopwords() {
  static const StopwordSet words = parse_stopwords(kStopwords);
  return words;
}

const SynonymLexicon& default_lexicon() {
  static const SynonymLexicon lexicon = parse_lexicon(kLexicon);
  return lexicon;
}

}  // namespace commlabel
