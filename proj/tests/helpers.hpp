#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"
#include "temp_dir.hpp"

namespace testutil {

struct PaperSpec {
  std::string id;
  int year;
  std::string venue;
  std::vector<std::string> refs;
};

inline citequal::Corpus make_corpus(const std::vector<PaperSpec>& specs) {
  citequal::Corpus c;
  c.source_label = "fixture";
  for (const auto& s : specs) {
    citequal::PaperRecord r;
    r.id = s.id;
    r.year = s.year;
    r.venue = s.venue;
    r.references = s.refs;
    c.papers.push_back(std::move(r));
  }
  return c;
}

}  // namespace testutil
