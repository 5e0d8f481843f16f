"""JavaScript-subset front end: lexer, validator, instrumenter."""
