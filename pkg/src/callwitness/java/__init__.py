"""Java-subset front end: lexer, parser, instrumenter, bundled runtime."""
