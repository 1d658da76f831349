#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgae/kgae.hpp"

namespace {

std::string format_help = "Report format: text or structured (JSON)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph autoencoder pipeline: embeddings, hierarchies, "
               "belief-network training and equilibrium testing"};
  app.require_subcommand(1);

  kgae::cli::ReproduceOptions rep;
  std::string rep_format = "text";
  auto* reproduce = app.add_subcommand(
      "reproduce", "Generate uniform data, train the autoencoder, report W statistics");
  reproduce->add_option("--properties", rep.properties, "Data dimension M")->capture_default_str();
  reproduce->add_option("--train-rows", rep.train_rows, "Training rows")->capture_default_str();
  reproduce->add_option("--test-rows", rep.test_rows, "Test rows")->capture_default_str();
  reproduce->add_option("--epochs", rep.epochs, "Training epochs")->capture_default_str();
  reproduce->add_option("--lr", rep.lr, "SGD learning rate")->capture_default_str();
  reproduce->add_option("--batch", rep.batch, "Minibatch size")->capture_default_str();
  reproduce->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  reproduce->add_option("--seeds", rep.seeds,
                        "Run this many consecutive seeds concurrently")->capture_default_str();
  reproduce->add_option("--out", rep.out, "Report path ('-' for stdout)")->capture_default_str();
  reproduce->add_option("--model-out", rep.model_out, "Also write the trained model here");
  reproduce->add_option("--format", rep_format, format_help)->capture_default_str();

  kgae::cli::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train an autoencoder on a CSV dataset");
  train_cmd->add_option("data", train.data, "Input CSV ('-' for stdin)")->required();
  train_cmd->add_option("--out", train.out, "Model file path")->required();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--lr", train.lr, "SGD learning rate")->capture_default_str();
  train_cmd->add_option("--batch", train.batch, "Minibatch size")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Master seed")->capture_default_str();

  kgae::cli::EncodeOptions encode;
  auto* encode_cmd = app.add_subcommand("encode", "Run a dataset through a trained model");
  encode_cmd->add_option("model", encode.model, "Model file")->required();
  encode_cmd->add_option("data", encode.data, "Input CSV ('-' for stdin)")->required();
  encode_cmd->add_option("--out", encode.out, "Output CSV ('-' for stdout)")
      ->capture_default_str();

  kgae::cli::HierarchyOptions hier;
  std::string eta_list;
  auto* hier_cmd = app.add_subcommand("hierarchy", "Build the sibling/binary hierarchy of a graph");
  hier_cmd->add_option("graph", hier.graph, "Graph file ('-' for stdin)")->required();
  hier_cmd->add_option("--out", hier.out, "Hierarchy JSON path ('-' for stdout)")
      ->capture_default_str();
  hier_cmd->add_option("--eta", eta_list,
                       "Fixed threshold(s), comma separated; default is per-node median");

  kgae::cli::EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("embed", "Co-occurrence SVD embedding of a corpus");
  embed_cmd->add_option("corpus", embed.corpus, "Corpus file, one document per line")->required();
  embed_cmd->add_option("--rank", embed.rank, "Embedding rank k")->capture_default_str();
  embed_cmd->add_option("--out", embed.out, "Embedding path ('-' for stdout)")
      ->capture_default_str();

  kgae::cli::SwTestOptions sw;
  std::string sw_format = "text";
  auto* sw_cmd = app.add_subcommand("swtest", "Shapiro-Wilk W of a CSV dataset, pooled");
  sw_cmd->add_option("data", sw.data, "Input CSV ('-' for stdin)")->required();
  sw_cmd->add_option("--out", sw.out, "Report path ('-' for stdout)")->capture_default_str();
  sw_cmd->add_option("--format", sw_format, format_help)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return kgae::cli::run_command([&]() -> int {
    if (reproduce->parsed()) {
      rep.format = kgae::cli::format_from_string(rep_format);
      return kgae::cli::cmd_reproduce(rep);
    }
    if (train_cmd->parsed()) return kgae::cli::cmd_train(train);
    if (encode_cmd->parsed()) return kgae::cli::cmd_encode(encode);
    if (hier_cmd->parsed()) {
      if (!eta_list.empty())
        for (auto tok : kgae::split(eta_list, ','))
          hier.fixed_eta.push_back(kgae::parse_double(tok, "eta"));
      return kgae::cli::cmd_hierarchy(hier);
    }
    if (embed_cmd->parsed()) return kgae::cli::cmd_embed(embed);
    if (sw_cmd->parsed()) {
      sw.format = kgae::cli::format_from_string(sw_format);
      return kgae::cli::cmd_swtest(sw);
    }
    return 2;
  });
}
