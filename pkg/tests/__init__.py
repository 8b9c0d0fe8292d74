# Test package for dilutehom
