use std::collections::BTreeMap;

/// Character trie over a word list.
#[derive(Debug, Clone)]
pub struct Lexicon {
    nodes: Vec<Node>,
    len: usize,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Node {
    pub parent: usize,
    pub ch: char,
    pub depth: usize,
    pub children: BTreeMap<char, usize>,
    pub word: Option<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::new()
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self {
            nodes: vec![Node::default()],
            len: 0,
        }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Self::new();
        for w in words {
            lex.insert(w.as_ref());
        }
        lex
    }

    pub fn insert(&mut self, word: &str) {
        if word.is_empty() {
            return;
        }
        let mut at = 0;
        for ch in word.chars() {
            at = match self.nodes[at].children.get(&ch) {
                Some(&next) => next,
                None => {
                    let depth = self.nodes[at].depth + 1;
                    self.nodes.push(Node {
                        parent: at,
                        ch,
                        depth,
                        ..Node::default()
                    });
                    let id = self.nodes.len() - 1;
                    self.nodes[at].children.insert(ch, id);
                    id
                }
            };
        }
        if self.nodes[at].word.is_none() {
            self.nodes[at].word = Some(word.to_string());
            self.len += 1;
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        let mut at = 0;
        for ch in word.chars() {
            match self.nodes[at].children.get(&ch) {
                Some(&n) => at = n,
                None => return false,
            }
        }
        self.nodes[at].word.is_some()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub(crate) fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter_map(|n| n.word.as_deref())
    }
}
