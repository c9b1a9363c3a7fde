
# Inicialização do módulo services