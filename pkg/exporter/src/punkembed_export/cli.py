import click

from .encoders import make_encoder
from .export import export_embeddings


@click.command()
@click.option("--corpus", "corpus_dir", required=True,
              help="directory with problems.jsonl and answers.jsonl")
@click.option("--concepts", "concepts_path", default=None,
              help="concept JSONL with definitions")
@click.option("--encoder", "encoder_spec", default="hashed",
              help="'hashed' or 'hf:<model-name>'")
@click.option("--dim", default=768, type=int,
              help="expected embedding dimension")
@click.option("--seed", default=0, type=int,
              help="seed for the hashed encoder")
@click.option("--out", required=True, help="output file prefix")
def main(corpus_dir, concepts_path, encoder_spec, dim, seed, out):
    """Export corpus embeddings as PUNKEMB1 data + index + manifest files."""
    encoder = make_encoder(encoder_spec, dim, seed)
    manifest = export_embeddings(
        corpus_dir, encoder, out, concepts_path, expected_dim=dim
    )
    click.echo(f"{manifest['n_items']} items, dim {manifest['dim']}")


if __name__ == "__main__":
    main()
