from pwrot.cli import main

main()
