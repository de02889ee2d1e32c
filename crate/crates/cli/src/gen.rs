//! Generator-spec parsing: `NAME k=v ...`.

use crate::commands::CliError;
use qroute_core::graph::generate;
use qroute_core::PortedGraph;
use std::collections::BTreeMap;

pub fn build(spec: &[String], default_seed: u64) -> Result<PortedGraph, CliError> {
    let name = spec.first().ok_or_else(|| CliError::usage("empty generator spec"))?;
    let mut params: BTreeMap<String, String> = BTreeMap::new();
    for item in &spec[1..] {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected k=v, got `{item}`")))?;
        params.insert(k.to_string(), v.to_string());
    }
    let int = |key: &str| -> Result<Option<usize>, CliError> {
        params
            .get(key)
            .map(|v| v.parse().map_err(|_| CliError::usage(format!("bad integer for {key}"))))
            .transpose()
    };
    let need = |key: &str| -> Result<usize, CliError> {
        int(key)?.ok_or_else(|| CliError::usage(format!("generator `{name}` needs {key}=")))
    };
    let seed = params
        .get("seed")
        .map(|v| v.parse().map_err(|_| CliError::usage("bad seed")))
        .transpose()?
        .unwrap_or(default_seed);
    let graph = match name.as_str() {
        "random" => {
            let n = need("n")?;
            let m = need("m")?;
            let weighted = int("weighted")?.unwrap_or(0) == 1;
            generate::gen_random_connected(n, m, weighted, seed)?
        }
        "star" => generate::gen_star(need("n")?)?,
        "path" => generate::gen_path(need("n")?)?,
        "complete" => generate::gen_complete(need("n")?)?,
        "two-cliques" => {
            let n = need("n")?;
            let bridge = match params.get("bridge") {
                None => None,
                Some(v) => {
                    let parts: Vec<usize> = v
                        .split(',')
                        .map(|x| x.parse().map_err(|_| CliError::usage("bad bridge")))
                        .collect::<Result<_, _>>()?;
                    if parts.len() != 4 {
                        return Err(CliError::usage("bridge needs a,b,c,d"));
                    }
                    Some((parts[0], parts[1], parts[2], parts[3]))
                }
            };
            generate::gen_two_cliques_crossed(n, bridge)?
        }
        "bfs-hard" => {
            let n = need("n")?;
            let d = need("d")?;
            let perm = params
                .get("perm-seed")
                .map(|v| v.parse().map_err(|_| CliError::usage("bad perm-seed")))
                .transpose()?
                .unwrap_or(seed);
            generate::gen_bfs_hard_instance(n, d, perm)?.0
        }
        other => return Err(CliError::usage(format!("unknown generator `{other}`"))),
    };
    Ok(graph)
}
