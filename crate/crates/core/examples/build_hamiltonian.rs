// The graph behind the algorithm: runway, tree, and the leaf edges that
// encode the input.

use std::collections::BTreeMap;

use nandwalk::lattice::{build_driver, build_full, build_oracle, IndexMap, NodeId};
use nandwalk::TreeInput;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let input: TreeInput = "0110".parse()?;
    let half_len = 3;

    let oracle = build_oracle(&input);
    println!("oracle edges (tree + extras layout):");
    for (u, v) in oracle.edges() {
        let map = oracle.index_map();
        println!("  {} - {}", map.node(u).unwrap(), map.node(v).unwrap());
    }

    let driver = build_driver(input.depth(), half_len)?;
    let full = build_full(&input, half_len)?;
    let layout = IndexMap::full(input.depth(), half_len);
    let sum = driver
        .embed_into(layout)?
        .plus(&oracle.embed_into(layout)?)?;
    println!(
        "\ndriver nnz {}, full nnz {}, driver + oracle equals full: {}",
        driver.matrix().nnz(),
        full.matrix().nnz(),
        sum.matrix() == full.matrix()
    );

    let mut census = BTreeMap::new();
    for i in 0..full.dim() {
        *census.entry(full.degree(i)).or_insert(0) += 1;
    }
    println!("dimension {}, degree census {census:?}", full.dim());

    let map = full.index_map();
    let root = map.root().unwrap();
    println!(
        "root is {} at index {root}, attached to {}",
        map.node(root).unwrap(),
        NodeId::Runway(0)
    );

    let mut edge_list = Vec::new();
    full.write_edge_list(&mut edge_list)?;
    println!(
        "edge list: {} lines",
        String::from_utf8(edge_list)?.lines().count()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
