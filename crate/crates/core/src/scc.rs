//! Iterative strongly-connected-components computation and the SCC-peeling
//! cycle check, shared by tangle discovery, tangle validation, the solution
//! verifier, and the oracle.

use crate::game::Player;

const UNVISITED: u32 = u32::MAX;

struct Frame {
    v: usize,
    succs: Vec<usize>,
    cursor: usize,
}

/// Tarjan's algorithm without recursion. `vertices` lists the subgraph's
/// vertices; `successors` pushes a vertex's subgraph successors into the
/// buffer. Members of each component come out ascending; components come
/// out in emission order (reverse topological).
pub(crate) fn strongly_connected_components(
    universe: usize,
    vertices: &[usize],
    successors: &mut dyn FnMut(usize, &mut Vec<usize>),
) -> Vec<Vec<usize>> {
    let mut index = vec![UNVISITED; universe];
    let mut low = vec![0u32; universe];
    let mut on_stack = vec![false; universe];
    let mut stack: Vec<usize> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut components = Vec::new();
    let mut next = 0u32;

    let open = |v: usize, next: &mut u32, stack: &mut Vec<usize>, index: &mut Vec<u32>, low: &mut Vec<u32>, on_stack: &mut Vec<bool>, successors: &mut dyn FnMut(usize, &mut Vec<usize>)| {
        index[v] = *next;
        low[v] = *next;
        *next += 1;
        stack.push(v);
        on_stack[v] = true;
        let mut succs = Vec::new();
        successors(v, &mut succs);
        Frame {
            v,
            succs,
            cursor: 0,
        }
    };

    for &root in vertices {
        if index[root] != UNVISITED {
            continue;
        }
        frames.push(open(root, &mut next, &mut stack, &mut index, &mut low, &mut on_stack, successors));
        while let Some(frame) = frames.last_mut() {
            let v = frame.v;
            if frame.cursor < frame.succs.len() {
                let w = frame.succs[frame.cursor];
                frame.cursor += 1;
                if index[w] == UNVISITED {
                    let new_frame = open(w, &mut next, &mut stack, &mut index, &mut low, &mut on_stack, successors);
                    frames.push(new_frame);
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
                let low_v = low[v];
                frames.pop();
                if let Some(parent) = frames.last() {
                    low[parent.v] = low[parent.v].min(low_v);
                }
            }
        }
    }
    components
}

/// Checks that every cycle of the restricted subgraph on `vertices` is won
/// by `player`, i.e. the maximum priority on the cycle has `player`'s
/// parity. Peels: per nontrivial SCC, the top priority must match, then the
/// top vertices are removed and the remainder re-examined. On failure
/// returns an offending component whose top priority has the wrong parity.
pub(crate) fn check_cycle_parity(
    universe: usize,
    vertices: Vec<usize>,
    successors: &mut dyn FnMut(usize, &mut Vec<usize>),
    priority: &dyn Fn(usize) -> usize,
    player: Player,
) -> Result<(), Vec<usize>> {
    let mut active = vec![false; universe];
    let mut pending = vec![vertices];
    let mut buf = Vec::new();

    while let Some(group) = pending.pop() {
        for &v in &group {
            active[v] = true;
        }
        let mut restricted = |v: usize, out: &mut Vec<usize>| {
            buf.clear();
            successors(v, &mut buf);
            out.extend(buf.iter().copied().filter(|&w| active[w]));
        };
        let components = strongly_connected_components(universe, &group, &mut restricted);
        for &v in &group {
            active[v] = false;
        }

        for component in components {
            if component.len() == 1 {
                let v = component[0];
                buf.clear();
                successors(v, &mut buf);
                if !buf.contains(&v) {
                    continue;
                }
            }
            let top = component.iter().map(|&v| priority(v)).max().unwrap();
            if !player.wins_priority(top) {
                return Err(component);
            }
            let remainder: Vec<usize> = component
                .iter()
                .copied()
                .filter(|&v| priority(v) != top)
                .collect();
            if !remainder.is_empty() {
                pending.push(remainder);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(edges: &[(usize, usize)]) -> impl FnMut(usize, &mut Vec<usize>) + '_ {
        move |v, out| out.extend(edges.iter().filter(|&&(a, _)| a == v).map(|&(_, b)| b))
    }

    #[test]
    fn components_of_two_cycles() {
        let edges = [(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)];
        let comps =
            strongly_connected_components(4, &[0, 1, 2, 3], &mut adj(&edges));
        assert_eq!(comps, vec![vec![2, 3], vec![0, 1]]);
    }

    #[test]
    fn singleton_components() {
        let edges = [(0, 1), (1, 2), (2, 2)];
        let comps = strongly_connected_components(3, &[0, 1, 2], &mut adj(&edges));
        assert_eq!(comps, vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn cycle_parity_accepts_dominated() {
        // 0 (pr 4) -> 1 (pr 1) -> 0; inner self-loop at 2 (pr 2).
        let edges = [(0, 1), (1, 0), (1, 2), (2, 2), (2, 0)];
        let pr = |v: usize| [4, 1, 2][v];
        let ok = check_cycle_parity(3, vec![0, 1, 2], &mut adj(&edges), &pr, Player::Even);
        assert_eq!(ok, Ok(()));
    }

    #[test]
    fn cycle_parity_finds_buried_cycle() {
        // Outer cycle max 4 hides a 1-2-1 cycle whose max 3 is odd.
        let edges = [(0, 1), (1, 2), (2, 1), (2, 0), (1, 0)];
        let pr = |v: usize| [4, 3, 2][v];
        let err = check_cycle_parity(3, vec![0, 1, 2], &mut adj(&edges), &pr, Player::Even);
        assert_eq!(err, Err(vec![1, 2]));
    }

    #[test]
    fn trivial_singleton_has_no_cycle() {
        let edges = [(0, 1), (1, 1)];
        let pr = |v: usize| [5, 2][v];
        let ok = check_cycle_parity(2, vec![0, 1], &mut adj(&edges), &pr, Player::Even);
        assert_eq!(ok, Ok(()));
    }
}
