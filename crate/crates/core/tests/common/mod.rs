#![allow(dead_code)]

pub mod eager;
