#pragma once

#include <string>
#include <vector>

#include "tbw/conllu.hpp"

namespace tbw::fixtures {

// Two attested Kakataibo sentences with synthetic (non-gold) trees. The
// trees are there to exercise validation and label inventories, so they
// are never used to score a parser.
std::string enclitic_example_conllu();  // aux:sgen, aux:ev, aux
std::string subject_example_conllu();  // nsubj:free, nsubj:bound
// Small invented sentences for tagger and parser unit tests.
std::string synthetic_conllu();

// All of the above, in that order.
Treebank bundled();

// Writes enclitics.conllu, subjects.conllu, synthetic.conllu and
// fixtures.conllu (all combined) into dir. Returns the written paths.
std::vector<std::string> export_fixtures(const std::string& dir);

}  // namespace tbw::fixtures
