#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgae/graph.hpp"
#include "kgae/matrix.hpp"
#include "kgae/svd.hpp"

namespace kgae {

// Pre-tokenized corpus: upstream has already done tokenization, stemming
// and the rest. Vocabulary indices follow first appearance.
struct TokenizedCorpus {
  std::vector<std::vector<std::size_t>> documents;  // token indices
  std::vector<std::string> vocabulary;

  std::size_t vocab_size() const { return vocabulary.size(); }
};

// One document per line, tokens separated by single spaces, UTF-8.
inline TokenizedCorpus read_corpus(std::istream& in) {
  TokenizedCorpus corpus;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::size_t> doc;
    for (auto tok : split(line, ' ')) {
      if (tok.empty()) continue;
      std::string word(tok);
      auto [it, inserted] = index.try_emplace(word, corpus.vocabulary.size());
      if (inserted) corpus.vocabulary.push_back(word);
      doc.push_back(it->second);
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

using DocTermMatrix = MatI;       // documents x vocabulary token counts
using CooccurrenceMatrix = MatI;  // vocabulary x vocabulary document counts

// counts[d][w] = multiplicity of token w in document d.
inline DocTermMatrix build_dtm(const TokenizedCorpus& corpus) {
  DocTermMatrix dtm(corpus.documents.size(), corpus.vocab_size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    for (std::size_t w : corpus.documents[d]) {
      if (w >= corpus.vocab_size())
        throw std::invalid_argument("corpus: token index outside vocabulary");
      ++dtm(d, w);
    }
  return dtm;
}

// Document-level indicator counts: off-diagonal (u,v) is the number of
// documents containing both words, the diagonal is document frequency.
inline CooccurrenceMatrix build_cooccurrence(const DocTermMatrix& dtm) {
  const std::size_t vocab = dtm.cols();
  CooccurrenceMatrix co(vocab, vocab);
  std::vector<std::size_t> present;
  for (std::size_t d = 0; d < dtm.rows(); ++d) {
    present.clear();
    for (std::size_t w = 0; w < vocab; ++w)
      if (dtm(d, w) > 0) present.push_back(w);
    for (std::size_t i = 0; i < present.size(); ++i) {
      ++co(present[i], present[i]);
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        ++co(present[i], present[j]);
        ++co(present[j], present[i]);
      }
    }
  }
  return co;
}

struct VocabMapping {
  std::unordered_map<std::string, std::size_t> pairs;  // sparse word -> generic index
  std::vector<std::string> unmatched;
};

namespace detail {
inline std::string ascii_fold(std::string_view word) {
  std::string out(word);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace detail

// Equates a sparse vocabulary with a generic one: exact matches first,
// then case-insensitive; anything left is reported unmatched.
inline VocabMapping map_sparse_vocab(const std::vector<std::string>& sparse,
                                     const std::vector<std::string>& generic) {
  std::unordered_map<std::string, std::size_t> exact;
  std::unordered_map<std::string, std::size_t> folded;
  for (std::size_t i = 0; i < generic.size(); ++i) {
    exact.try_emplace(generic[i], i);
    folded.try_emplace(detail::ascii_fold(generic[i]), i);
  }
  VocabMapping mapping;
  for (const auto& word : sparse) {
    if (mapping.pairs.contains(word)) continue;  // each sparse word maps at most once
    if (auto it = exact.find(word); it != exact.end()) {
      mapping.pairs.emplace(word, it->second);
    } else if (auto fit = folded.find(detail::ascii_fold(word)); fit != folded.end()) {
      mapping.pairs.emplace(word, fit->second);
    } else {
      mapping.unmatched.push_back(word);
    }
  }
  return mapping;
}

// One entity per word; an undirected edge wherever two words share a
// document, weighted by the co-occurrence count.
inline KnowledgeGraph build_graph(const EmbeddingMap& embedding,
                                  const CooccurrenceMatrix& cooc,
                                  const std::vector<std::string>& words,
                                  const Dataset& properties,
                                  std::vector<std::string> property_names = {}) {
  const std::size_t vocab = words.size();
  if (cooc.rows() != vocab || cooc.cols() != vocab)
    throw std::invalid_argument("build_graph: co-occurrence matrix does not match vocabulary");
  if (embedding.left.rows() != vocab)
    throw std::invalid_argument("build_graph: embedding does not match vocabulary");
  if (properties.rows() != vocab)
    throw std::invalid_argument("build_graph: property rows do not match vocabulary");
  if (property_names.empty()) {
    for (std::size_t j = 0; j < properties.cols(); ++j)
      property_names.push_back("p" + std::to_string(j));
  }
  if (property_names.size() != properties.cols())
    throw std::invalid_argument("build_graph: property name count does not match row width");

  KnowledgeGraph kg(std::move(property_names));
  for (std::size_t i = 0; i < vocab; ++i) kg.add_entity(words[i], properties.row(i));
  for (std::size_t u = 0; u < vocab; ++u)
    for (std::size_t v = u + 1; v < vocab; ++v)
      if (cooc(u, v) > 0) kg.add_edge(words[u], words[v], static_cast<double>(cooc(u, v)));
  return kg;
}

}  // namespace kgae
