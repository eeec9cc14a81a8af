#pragma once

#include <string>

#include "natlog.hpp"

namespace natlog::testing {

inline std::string data_path(const std::string& file) { return std::string(NATLOG_DATA_DIR) + "/" + file; }

/// Toy KB, inventory and default lexicons, loaded once.
struct ToyResources {
  LexicalKB kb;
  PolarityLexicon lexicon = PolarityLexicon::defaults();
  ProjectivityTable table = ProjectivityTable::defaults();

  ToyResources() : kb(load_kb(data_path("toy_kb.jsonl"))) { load_inventory(kb, data_path("inventory.tsv")); }

  static const ToyResources& get() {
    static const ToyResources r;
    return r;
  }

  AttackResources attack() const { return {kb, lexicon, table}; }
  AnnotatedSentence annotate(std::string_view s) const { return annotate_text(s, kb, lexicon, table); }
};

}  // namespace natlog::testing
