#include "ultratag/llm/prompt.hpp"

#include <cctype>
#include <stdexcept>

#include "ultratag/core/text.hpp"

namespace ultratag::llm {

namespace {

constexpr std::string_view kKeywordsQuestion =
    "Please help me identify the five keywords from its title and abstract that are most relevant "
    "for classification, and directly output the keywords. The title and abstract of the paper are "
    "as follows:";

constexpr std::string_view kSoftLabelQuestion =
    "Based on its title and abstract, please predict the most appropriate label for this paper and "
    "provide only the label as your response. The title and abstract of the paper are as follows:";

constexpr std::string_view kSummaryQuestion =
    "Please summarize the title and abstract to improve their suitability for the classification "
    "task. Output only the summary text, without including any irrelevant content. The title and "
    "abstract of the paper are as follows:";

constexpr std::string_view kEdgeQuestion =
    "You are provided with the text information of two nodes and their predicted category "
    "pseudo-label. Use this information to evaluate whether an edge should exist between the two "
    "nodes, and return a probability value between 0 and 1 representing the likelihood of the "
    "edge's existence. Only output the probability value, without any additional or irrelevant "
    "content.";

struct BuiltinDescription {
  std::string_view name;
  std::string_view text;
};

constexpr BuiltinDescription kDescriptions[] = {
    {"cora",
     "Now, here is a paper from the Cora dataset. This paper falls into one of seven categories: "
     "Case-based, Genetic Algorithms, Neural Networks, Probabilistic Methods, Reinforcement "
     "Learning, Rule Learning, and Theory."},
    {"citeseer",
     "Now, here is a paper from the Citeseer dataset. This paper falls into one of six categories: "
     "Agents, Machine Learning, Information Retrieval, Databases, Human-Computer Interaction, or "
     "Artificial Intelligence."},
    {"pubmed",
     "The following is a paper from the PubMed dataset, which contains 19,717 scientific "
     "publications related to diabetes. These publications are categorized into three classes: "
     "Experimentally Induced Diabetes, Type 1 Diabetes, and Type 2 Diabetes."},
    {"wikics",
     "Here is an article from the WikiCS dataset. This dataset is a Wikipedia-based resource "
     "developed for benchmarking Graph Neural Networks (GNNs). It is derived from Wikipedia "
     "categories and includes 10 classes representing various branches of computer science, "
     "characterized by a high degree of connectivity. The 10 classes are Computational "
     "Linguistics, Databases, Operating Systems, Computer Architecture, Computer Security, "
     "Internet Protocols, Computer File Systems, Distributed Computing Architectures, Web "
     "Technologies, and Programming Languages."},
    {"instagram",
     "This is a post from Instagram, a social network where edges represent following "
     "relationships and nodes represent users. The task is to classify users into two categories: "
     "commercial and normal."},
    {"reddit",
     "This is a post from the Reddit dataset, a social network where nodes represent users, and "
     "node features are derived from the content of users' historically published subreddits. "
     "Edges represent whether two users have replied to each other. The task is to classify users "
     "as belonging to the top 50 percent in popularity, based on the average score of all their "
     "subreddits. Node text features are generated from the content of each user’s last three "
     "posts. Users are categorized as 'popular' or 'normal' based on the median of their average "
     "historical post scores, with those above the median classified as 'popular' and the rest as "
     "'normal'."},
    {"elo-photo",
     "Here is a product review from the Elo-Potho dataset. The Elo-Potho dataset is derived from "
     "the Amazon-Electronics dataset. In this dataset, nodes represent electronics products, and "
     "edges indicate frequent co-purchases or co-views between products. Each node is labeled "
     "according to a three-level classification scheme for electronics products. User reviews "
     "serve as the textual attributes for the nodes; when multiple reviews are available for a "
     "product, the review with the highest number of votes is selected. If no such review exists, "
     "a random review is used. The task is to classify electronics products into 12 predefined "
     "categories. The categories are: Amazon Echo, Camera, Cell Phones, Clothing, Computers, Home "
     "and Kitchen, Laptops, Music, Office Supplies, Personal Care, Shoes, Sports and Outdoors."},
};

std::size_t expected_texts(PromptKind kind) { return kind == PromptKind::EdgeJudge ? 2 : 1; }
std::size_t expected_labels(PromptKind kind) { return kind == PromptKind::EdgeJudge ? 2 : 0; }

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::Summary: return "summary";
    case PromptKind::Keywords: return "keywords";
    case PromptKind::SoftLabel: return "soft_label";
    case PromptKind::EdgeJudge: return "edge_judge";
  }
  return "unknown";
}

RenderedPrompt render_prompt(PromptKind kind, std::string_view dataset_description,
                             PromptPayload payload, std::vector<std::string> class_names) {
  if (payload.texts.size() != expected_texts(kind) || payload.soft_labels.size() != expected_labels(kind)) {
    throw std::invalid_argument("render_prompt(" + std::string(to_string(kind)) + "): expected " +
                                std::to_string(expected_texts(kind)) + " text(s) and " +
                                std::to_string(expected_labels(kind)) + " soft label(s)");
  }
  RenderedPrompt p;
  p.kind = kind;
  p.dataset_description = std::string(dataset_description);
  if (!p.dataset_description.empty() && !std::isspace(static_cast<unsigned char>(p.dataset_description.back()))) {
    p.dataset_description += ' ';
  }

  switch (kind) {
    case PromptKind::Summary:
      p.question = std::string(kSummaryQuestion) + payload.texts[0];
      break;
    case PromptKind::Keywords:
      p.question = std::string(kKeywordsQuestion) + payload.texts[0];
      break;
    case PromptKind::SoftLabel:
      p.question = std::string(kSoftLabelQuestion) + payload.texts[0];
      break;
    case PromptKind::EdgeJudge:
      p.question = std::string(kEdgeQuestion) + " As for Node 1: " + payload.texts[0] +
                   ". Your prediction label is " + payload.soft_labels[0] + "; As for Node 2: " +
                   payload.texts[1] + ". Your prediction label is " + payload.soft_labels[1] + ".";
      break;
  }
  p.full_text = p.dataset_description + p.question;
  p.payload = std::move(payload);
  p.class_names = std::move(class_names);
  return p;
}

std::optional<std::string> builtin_dataset_description(std::string_view name) {
  const auto key = to_lower(name);
  for (const auto& d : kDescriptions) {
    if (d.name == key) return std::string(d.text);
  }
  return std::nullopt;
}

std::string generic_dataset_description(const std::vector<std::string>& class_names) {
  std::string out = "Here is a node from a text-attributed graph. It falls into one of " +
                    std::to_string(class_names.size()) + " categories: ";
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (i > 0) out += i + 1 == class_names.size() ? ", and " : ", ";
    out += class_names[i];
  }
  out += '.';
  return out;
}

}  // namespace ultratag::llm
